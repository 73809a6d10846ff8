import type {
  Nonconformity,
  OverdueReport,
  PortfolioHealth,
  Projection,
  RiskEntry,
} from "./types";

export interface Actor {
  id: string;
  role: string;
}

/** HTTP error carrying the server's error code and message untouched. */
export class ApiError extends Error {
  status: number;
  code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let code = "HttpError";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && typeof body.message === "string") {
      code = String(body.error ?? code);
      message = body.message;
    } else if (body && body.detail !== undefined) {
      // FastAPI request validation shape
      code = "ValidationError";
      message = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    }
  } catch {
    // non-JSON body, keep the status line
  }
  return new ApiError(response.status, code, message);
}

const MUTATION_RETRIES = 2;

/**
 * Client for the engine's JSON API. Every displayed score, band, and
 * message originates from a response of this client; the dashboard holds
 * no scoring logic of its own.
 */
export class ApiClient {
  actor: Actor;
  private base: string;
  private retryDelayMs: number;
  private queues = new Map<string, Promise<unknown>>();

  constructor(actor: Actor, base = "/api", retryDelayMs = 150) {
    this.actor = actor;
    this.base = base;
    this.retryDelayMs = retryDelayMs;
  }

  private headers(withBody: boolean): Record<string, string> {
    const h: Record<string, string> = {
      "X-Actor-Id": this.actor.id,
      "X-Actor-Role": this.actor.role,
    };
    if (withBody) h["Content-Type"] = "application/json";
    return h;
  }

  async get<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path, { headers: this.headers(false) });
    if (!response.ok) throw await errorFrom(response);
    return response.json() as Promise<T>;
  }

  private async postOnce<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await errorFrom(response);
    return response.json() as Promise<T>;
  }

  /**
   * Mutations are serialized per entity and retried on 409, so two panels
   * racing on the same record resolve in order instead of clobbering.
   */
  async post<T>(path: string, body: unknown, entityKey?: string): Promise<T> {
    const key = entityKey ?? path;
    const previous = this.queues.get(key) ?? Promise.resolve();
    const run = previous.catch(() => undefined).then(async () => {
      let attempt = 0;
      for (;;) {
        try {
          return await this.postOnce<T>(path, body);
        } catch (err) {
          if (err instanceof ApiError && err.status === 409 && attempt < MUTATION_RETRIES) {
            attempt += 1;
            await new Promise((resolve) => setTimeout(resolve, this.retryDelayMs));
            continue;
          }
          throw err;
        }
      }
    });
    this.queues.set(key, run);
    return run as Promise<T>;
  }

  // typed wrappers for the endpoints the dashboard uses

  listRisks(): Promise<RiskEntry[]> {
    return this.get("/risks");
  }

  projection(riskId: string, impact: number, likelihood: number): Promise<Projection> {
    const q = `impact=${impact}&likelihood=${likelihood}`;
    return this.get(`/risks/${encodeURIComponent(riskId)}/projection?${q}`);
  }

  portfolioHealth(): Promise<PortfolioHealth> {
    return this.get("/reports/portfolio-health");
  }

  approveResidual(
    riskId: string,
    impact: number,
    likelihood: number,
    medium: string
  ): Promise<unknown> {
    return this.post(
      `/risks/${encodeURIComponent(riskId)}/residual-approval`,
      { impact, likelihood, medium },
      riskId
    );
  }

  listNonconformities(): Promise<Nonconformity[]> {
    return this.get("/nonconformities");
  }

  overdueReport(today?: string): Promise<OverdueReport> {
    const q = today ? `&today=${encodeURIComponent(today)}` : "";
    return this.get(`/nonconformities?state=overdue${q}`);
  }

  advanceNc(
    ncId: string,
    evidence: string,
    riskReviewRef?: string
  ): Promise<Nonconformity> {
    const body: Record<string, unknown> = { evidence };
    if (riskReviewRef) body.riskReviewRef = riskReviewRef;
    return this.post(`/nonconformities/${encodeURIComponent(ncId)}/advance`, body, ncId);
  }

  extendNc(ncId: string, justification: string, newDeadline: string): Promise<Nonconformity> {
    return this.post(
      `/nonconformities/${encodeURIComponent(ncId)}/extend`,
      { justification, newDeadline },
      ncId
    );
  }

  dispenseNc(ncId: string, reason: string): Promise<Nonconformity> {
    return this.post(`/nonconformities/${encodeURIComponent(ncId)}/dispensation`, { reason }, ncId);
  }
}
