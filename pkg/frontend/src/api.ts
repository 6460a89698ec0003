// Typed client for the labeling server's HTTP API.

export interface ImageMeta {
  width: number;
  height: number;
  channels: number;
}

export interface PendingQuery {
  query_id: string;
  i: number;
  j: number;
  image_meta?: ImageMeta;
  image_i?: string; // base64 uint8 pixels
  image_j?: string;
  vector_i?: number[]; // raw features when the dataset is not images
  vector_j?: number[];
}

export interface DoneResponse {
  done: true;
  final_labels: number[];
}

export type NextResponse = PendingQuery | DoneResponse;

export interface SessionState {
  phase: "exploring" | "querying" | "done" | "error";
  queries_used: number;
  n_certain_sets: number;
  current_labels: number[] | null;
  error?: number;
  detail?: string;
}

export interface AnswerResult {
  status: "accepted" | "rejected";
  reason?: "stale" | "done";
}

export function isDone(r: NextResponse): r is DoneResponse {
  return (r as DoneResponse).done === true;
}

const RETRY_DELAYS_MS = [500, 1000, 2000, 4000];

async function requestJSON<T>(
  url: string,
  init: RequestInit,
  fetchFn: typeof fetch,
  sleep: (ms: number) => Promise<void>,
): Promise<T> {
  let lastError: unknown;
  for (let attempt = 0; attempt <= RETRY_DELAYS_MS.length; attempt++) {
    try {
      const res = await fetchFn(url, init);
      if (!res.ok) {
        throw new Error(`${init.method ?? "GET"} ${url}: HTTP ${res.status}`);
      }
      return (await res.json()) as T;
    } catch (err) {
      lastError = err;
      if (attempt < RETRY_DELAYS_MS.length) {
        await sleep(RETRY_DELAYS_MS[attempt]);
      }
    }
  }
  throw lastError;
}

const realSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch.bind(globalThis),
    private sleep: (ms: number) => Promise<void> = realSleep,
  ) {}

  createSession(config: unknown): Promise<{ id: string }> {
    return requestJSON(
      `${this.baseUrl}/sessions`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(config),
      },
      this.fetchFn,
      this.sleep,
    );
  }

  next(sessionId: string): Promise<NextResponse> {
    return requestJSON(
      `${this.baseUrl}/sessions/${sessionId}/next`,
      {},
      this.fetchFn,
      this.sleep,
    );
  }

  // Retries reuse the same query_id, so the server treats a duplicate of an
  // already-consumed answer as stale rather than applying it twice.
  answer(sessionId: string, queryId: string, mustLink: boolean): Promise<AnswerResult> {
    return requestJSON(
      `${this.baseUrl}/sessions/${sessionId}/answers`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ query_id: queryId, must_link: mustLink }),
      },
      this.fetchFn,
      this.sleep,
    );
  }

  state(sessionId: string): Promise<SessionState> {
    return requestJSON(
      `${this.baseUrl}/sessions/${sessionId}/state`,
      {},
      this.fetchFn,
      this.sleep,
    );
  }

  traceUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/trace`;
  }
}
