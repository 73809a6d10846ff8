import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api";
import { interceptFetch } from "./helpers";

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("sends the session actor as headers on every request", async () => {
    const calls = interceptFetch({
      "GET /risks": { body: [] },
      "POST /nonconformities/nc-1/advance": { body: { id: "nc-1" } },
    });

    const api = new ApiClient({ id: "oakley", role: "CISO" }, "", 0);
    await api.listRisks();
    await api.advanceNc("nc-1", "done");

    expect(calls[0].headers["X-Actor-Id"]).toBe("oakley");
    expect(calls[0].headers["X-Actor-Role"]).toBe("CISO");
    expect(calls[1].headers["X-Actor-Id"]).toBe("oakley");
    expect(calls[1].headers["Content-Type"]).toBe("application/json");
  });

  it("retries a mutation that hits a 409 and resolves with the second answer", async () => {
    const calls = interceptFetch({
      "POST /nonconformities/nc-1/advance": [
        { status: 409, body: { error: "ConflictRetry", message: "stale version 3, store is at 4" } },
        { body: { id: "nc-1", currentStep: 2 } },
      ],
    });

    const api = new ApiClient({ id: "u", role: "CorrectiveActionsAdmin" }, "", 0);
    const result = await api.advanceNc("nc-1", "work");

    expect(calls.length).toBe(2);
    expect(result).toEqual({ id: "nc-1", currentStep: 2 });
  });

  it("gives up after repeated conflicts and rethrows the 409", async () => {
    interceptFetch({
      "POST /nonconformities/nc-1/advance": {
        status: 409,
        body: { error: "ConflictRetry", message: "stale version 3, store is at 9" },
      },
    });

    const api = new ApiClient({ id: "u", role: "CorrectiveActionsAdmin" }, "", 0);
    await expect(api.advanceNc("nc-1", "work")).rejects.toMatchObject({
      status: 409,
      code: "ConflictRetry",
    });
  });

  it("does not retry non-conflict errors and keeps the body message verbatim", async () => {
    const calls = interceptFetch({
      "POST /nonconformities/nc-1/dispensation": {
        status: 403,
        body: { error: "Forbidden", message: "role CISO not permitted; requires TopManagement" },
      },
    });

    const api = new ApiClient({ id: "u", role: "CISO" }, "", 0);
    try {
      await api.dispenseNc("nc-1", "not needed");
      expect.unreachable("dispensation should have been refused");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).message).toBe("role CISO not permitted; requires TopManagement");
      expect((err as ApiError).status).toBe(403);
    }
    expect(calls.length).toBe(1);
  });

  it("serializes mutations aimed at the same entity", async () => {
    const order: string[] = [];
    vi.stubGlobal(
      "fetch",
      vi.fn(async (_input: RequestInfo | URL, init?: RequestInit) => {
        const body = JSON.parse(String(init?.body));
        order.push(`start ${body.evidence}`);
        await new Promise((resolve) => setTimeout(resolve, body.evidence === "first" ? 20 : 0));
        order.push(`end ${body.evidence}`);
        return new Response(JSON.stringify({ ok: true }), {
          status: 200,
          headers: { "Content-Type": "application/json" },
        });
      })
    );

    const api = new ApiClient({ id: "u", role: "CorrectiveActionsAdmin" }, "", 0);
    await Promise.all([api.advanceNc("nc-1", "first"), api.advanceNc("nc-1", "second")]);

    expect(order).toEqual(["start first", "end first", "start second", "end second"]);
  });
});
