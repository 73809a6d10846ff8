import { vi } from "vitest";

export interface RecordedCall {
  method: string;
  url: string;
  headers: Record<string, string>;
  body?: unknown;
}

export interface FixtureResponse {
  status?: number;
  body: unknown;
}

type Route = FixtureResponse | FixtureResponse[];

/**
 * Replace global fetch with a fixture table keyed by "METHOD url". An array
 * value is consumed one response per call (the last repeats), which lets a
 * test model a 409 followed by success. Every call is recorded so tests can
 * assert exactly which requests the UI made.
 */
export function interceptFetch(routes: Record<string, Route>): RecordedCall[] {
  const calls: RecordedCall[] = [];
  const cursors = new Map<string, number>();

  const fake = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = (init?.method ?? "GET").toUpperCase();
    const key = `${method} ${url}`;

    calls.push({
      method,
      url,
      headers: { ...((init?.headers as Record<string, string>) ?? {}) },
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });

    const route = routes[key];
    if (route === undefined) {
      return new Response(
        JSON.stringify({ error: "FixtureMiss", message: `no fixture for ${key}` }),
        { status: 404, headers: { "Content-Type": "application/json" } }
      );
    }

    let fixture: FixtureResponse;
    if (Array.isArray(route)) {
      const index = Math.min(cursors.get(key) ?? 0, route.length - 1);
      cursors.set(key, index + 1);
      fixture = route[index];
    } else {
      fixture = route;
    }

    return new Response(JSON.stringify(fixture.body), {
      status: fixture.status ?? 200,
      headers: { "Content-Type": "application/json" },
    });
  });

  vi.stubGlobal("fetch", fake);
  return calls;
}

/** Let queued promises and zero-delay timers run. */
export async function flushAsync(rounds = 4): Promise<void> {
  for (let i = 0; i < rounds; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}
