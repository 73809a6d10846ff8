import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { renderWhatIf } from "../src/whatif";
import { flushAsync, interceptFetch } from "./helpers";
import { rating, riskEntry } from "./fixtures";

const BASE = riskEntry("r-44", 4, 4, 64, rating("Significant", "MgmtTrigger", 1));

function setSlider(root: HTMLElement, field: string, value: number): void {
  const slider = root.querySelector(`[data-field="${field}"]`) as HTMLInputElement;
  slider.value = String(value);
  slider.dispatchEvent(new Event("input", { bubbles: true }));
}

function panel(): { root: HTMLElement; api: ApiClient } {
  const api = new ApiClient({ id: "ro", role: "RiskOwner" }, "", 0);
  const root = renderWhatIf({ api, entries: [BASE] });
  document.body.appendChild(root);
  return { root, api };
}

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.innerHTML = "";
});

describe("what-if projection panel", () => {
  it("shows the API-computed 16/Negligible for (2,2) on a base (4,4) entry", async () => {
    const calls = interceptFetch({
      "GET /risks/r-44/projection?impact=4&likelihood=4": {
        body: {
          riskId: "r-44",
          impact: 4,
          likelihood: 4,
          score: 64,
          rating: rating("Significant", "MgmtTrigger", 1),
          portfolioHealth: { band: "Fair", percent: 16.0 },
        },
      },
      "GET /risks/r-44/projection?impact=2&likelihood=2": {
        body: {
          riskId: "r-44",
          impact: 2,
          likelihood: 2,
          score: 16,
          rating: rating("Negligible", "RiskAppetite", 12),
          portfolioHealth: { band: "Strong", percent: 4.0 },
        },
      },
    });

    const { root } = panel();
    await flushAsync();

    // sliders start at the entry's base coordinates and show its base score
    expect(root.querySelector('[data-field="score"]')?.textContent).toBe("64");

    setSlider(root, "impact", 2);
    setSlider(root, "likelihood", 2);
    await flushAsync();

    expect(root.querySelector('[data-field="score"]')?.textContent).toBe("16");
    expect(root.querySelector('[data-field="band"]')?.textContent).toBe("Negligible");
    expect(root.querySelector('[data-field="health"]')?.textContent).toBe("4% Strong");

    const projectionCalls = calls.filter((c) => c.url.includes("/projection"));
    expect(projectionCalls.map((c) => c.url)).toContain(
      "/risks/r-44/projection?impact=2&likelihood=2"
    );
  });

  it("displays whatever the projection endpoint returns, proving no local arithmetic", async () => {
    // f(2,2) would be 16; the fixture says 937/"Implausible". If any client
    // code computed the score, the 937 could never reach the screen.
    interceptFetch({
      "GET /risks/r-44/projection?impact=4&likelihood=4": {
        body: {
          riskId: "r-44",
          impact: 4,
          likelihood: 4,
          score: 64,
          rating: rating("Significant", "MgmtTrigger", 1),
          portfolioHealth: { band: "Fair", percent: 16.0 },
        },
      },
      "GET /risks/r-44/projection?impact=2&likelihood=2": {
        body: {
          riskId: "r-44",
          impact: 2,
          likelihood: 2,
          score: 937,
          rating: rating("Implausible", "RiskAppetite", 12),
          portfolioHealth: { band: "Odd", percent: 1.23 },
        },
      },
    });

    const { root } = panel();
    await flushAsync();
    setSlider(root, "impact", 2);
    setSlider(root, "likelihood", 2);
    await flushAsync();

    expect(root.querySelector('[data-field="score"]')?.textContent).toBe("937");
    expect(root.querySelector('[data-field="band"]')?.textContent).toBe("Implausible");
    expect(root.querySelector('[data-field="health"]')?.textContent).toBe("1.23% Odd");
  });

  it("surfaces projection validation errors inline", async () => {
    interceptFetch({
      "GET /risks/r-44/projection?impact=4&likelihood=4": {
        status: 422,
        body: { error: "ValidationError", message: "impact must be between 1 and 5" },
      },
    });

    const { root } = panel();
    await flushAsync();

    expect(root.querySelector('[data-field="error"]')?.textContent).toBe(
      "impact must be between 1 and 5"
    );
  });

  it("submits the approval flow through the residual-approval endpoint", async () => {
    const calls = interceptFetch({
      "GET /risks/r-44/projection?impact=4&likelihood=4": {
        body: {
          riskId: "r-44",
          impact: 4,
          likelihood: 4,
          score: 64,
          rating: rating("Significant", "MgmtTrigger", 1),
          portfolioHealth: { band: "Fair", percent: 16.0 },
        },
      },
      "POST /risks/r-44/residual-approval": {
        body: { id: "r-44", residualScore: 64 },
      },
    });

    const { root } = panel();
    await flushAsync();
    (root.querySelector('[data-field="approve"]') as HTMLButtonElement).click();
    await flushAsync();

    const post = calls.find((c) => c.method === "POST");
    expect(post?.url).toBe("/risks/r-44/residual-approval");
    expect(post?.body).toEqual({ impact: 4, likelihood: 4, medium: "Electronic" });
    expect(root.querySelector('[data-field="error"]')?.textContent).toBe(
      "Residual approval recorded."
    );
  });
});
