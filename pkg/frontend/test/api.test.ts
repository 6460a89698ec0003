import { describe, expect, it } from "vitest";
import { ApiClient, isDone } from "../src/api.js";

const noSleep = () => Promise.resolve();

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("isDone", () => {
  it("distinguishes done payloads from pending queries", () => {
    expect(isDone({ done: true, final_labels: [0] })).toBe(true);
    expect(isDone({ query_id: "q0", i: 0, j: 1 })).toBe(false);
  });
});

describe("ApiClient retry", () => {
  it("retries a failed request and succeeds", async () => {
    let calls = 0;
    const fetchFn = async () => {
      calls++;
      if (calls < 3) throw new Error("connection refused");
      return jsonResponse({ query_id: "q0", i: 0, j: 1 });
    };
    const client = new ApiClient("http://x", fetchFn as typeof fetch, noSleep);
    const r = await client.next("s1");
    expect(calls).toBe(3);
    expect(isDone(r)).toBe(false);
  });

  it("gives up after exhausting the backoff schedule", async () => {
    let calls = 0;
    const fetchFn = async () => {
      calls++;
      throw new Error("down");
    };
    const client = new ApiClient("http://x", fetchFn as typeof fetch, noSleep);
    await expect(client.next("s1")).rejects.toThrow("down");
    expect(calls).toBe(5); // initial attempt + 4 retries
  });

  it("treats HTTP error statuses as retryable failures", async () => {
    let calls = 0;
    const fetchFn = async () => {
      calls++;
      return calls < 2 ? jsonResponse({}, 503) : jsonResponse({ status: "accepted" });
    };
    const client = new ApiClient("http://x", fetchFn as typeof fetch, noSleep);
    const r = await client.answer("s1", "q0", true);
    expect(r.status).toBe("accepted");
  });

  it("resends the identical body on retry so the answer stays idempotent", async () => {
    const bodies: string[] = [];
    let calls = 0;
    const fetchFn = async (_url: RequestInfo | URL, init?: RequestInit) => {
      calls++;
      bodies.push(String(init?.body));
      if (calls < 2) throw new Error("timeout");
      return jsonResponse({ status: "rejected", reason: "stale" });
    };
    const client = new ApiClient("http://x", fetchFn as typeof fetch, noSleep);
    const r = await client.answer("s1", "q7", false);
    expect(bodies.length).toBe(2);
    expect(bodies[0]).toBe(bodies[1]);
    expect(JSON.parse(bodies[0])).toEqual({ query_id: "q7", must_link: false });
    // the duplicate of an already-consumed answer comes back stale, not applied
    expect(r).toEqual({ status: "rejected", reason: "stale" });
  });
});

describe("ApiClient endpoints", () => {
  it("hits the documented paths", async () => {
    const urls: string[] = [];
    const fetchFn = async (url: RequestInfo | URL) => {
      urls.push(String(url));
      return jsonResponse({ id: "s1" });
    };
    const client = new ApiClient("http://h:8000", fetchFn as typeof fetch, noSleep);
    await client.createSession({});
    await client.next("s1");
    await client.state("s1");
    expect(urls).toEqual([
      "http://h:8000/sessions",
      "http://h:8000/sessions/s1/next",
      "http://h:8000/sessions/s1/state",
    ]);
    expect(client.traceUrl("s1")).toBe("http://h:8000/sessions/s1/trace");
  });
});
