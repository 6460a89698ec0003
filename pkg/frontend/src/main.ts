// Browser wiring: polls the server once per second, renders the pending pair,
// and turns s/d key presses into answers.

import { ApiClient } from "./api.js";
import type { PendingQuery } from "./api.js";
import {
  decodeBase64,
  heatStripCells,
  payloadMatchesMeta,
  toRGBA,
  upscaleFactor,
} from "./render.js";
import {
  applyAnswerResult,
  applyNext,
  applyProgress,
  initialState,
  isFinished,
  setBanner,
  trySubmit,
} from "./state.js";
import type { ViewState } from "./state.js";

const POLL_MS = 1000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function drawImage(canvas: HTMLCanvasElement, q: PendingQuery, which: "i" | "j"): boolean {
  const meta = q.image_meta!;
  const data = which === "i" ? q.image_i! : q.image_j!;
  const pixels = decodeBase64(data);
  if (!payloadMatchesMeta(pixels, meta)) return false;
  const scale = upscaleFactor(meta);
  canvas.width = meta.width * scale;
  canvas.height = meta.height * scale;
  const ctx = canvas.getContext("2d")!;
  const rgba = toRGBA(pixels, meta, scale);
  ctx.putImageData(new ImageData(rgba, canvas.width, canvas.height), 0, 0);
  return true;
}

function drawStrip(canvas: HTMLCanvasElement, values: number[]): void {
  const cells = heatStripCells(values);
  const cellW = Math.max(2, Math.floor(320 / Math.max(1, cells.length)));
  canvas.width = cellW * cells.length;
  canvas.height = 24;
  const ctx = canvas.getContext("2d")!;
  cells.forEach((v, k) => {
    ctx.fillStyle = `rgb(${v},${v},${v})`;
    ctx.fillRect(k * cellW, 0, cellW, canvas.height);
  });
}

class App {
  private state: ViewState;
  private client: ApiClient;

  constructor(baseUrl: string, sessionId: string) {
    this.client = new ApiClient(baseUrl);
    this.state = initialState(sessionId);
  }

  async poll(): Promise<void> {
    try {
      const [next, progress] = await Promise.all([
        this.client.next(this.state.sessionId),
        this.client.state(this.state.sessionId),
      ]);
      this.state = applyProgress(applyNext(this.state, next), progress);
    } catch (err) {
      this.state = setBanner(this.state, `server unreachable: ${String(err)}`);
    }
    this.render();
  }

  async onKey(key: string): Promise<void> {
    const { state, submit } = trySubmit(this.state, key);
    this.state = state;
    if (!submit) return;
    this.render();
    try {
      const result = await this.client.answer(
        this.state.sessionId,
        submit.queryId,
        submit.mustLink,
      );
      this.state = applyAnswerResult(this.state, submit.queryId, submit.mustLink, result);
    } catch (err) {
      this.state = setBanner(
        { ...this.state, inFlight: null, pending: null },
        `answer failed: ${String(err)}`,
      );
    }
    await this.poll();
  }

  render(): void {
    const q = this.state.pending;
    const banner = el<HTMLDivElement>("banner");
    const pairBox = el<HTMLDivElement>("pair");
    const doneBox = el<HTMLDivElement>("completion");
    let bannerText = this.state.banner;
    let submitOk = q !== null && this.state.inFlight === null;

    if (q) {
      if (q.image_meta && q.image_i && q.image_j) {
        const okI = drawImage(el("canvas-i"), q, "i");
        const okJ = drawImage(el("canvas-j"), q, "j");
        if (!okI || !okJ) {
          bannerText = "image payload does not match its declared size";
          submitOk = false;
        }
      } else {
        drawStrip(el("canvas-i"), q.vector_i ?? []);
        drawStrip(el("canvas-j"), q.vector_j ?? []);
      }
      el("pair-label").textContent = `points #${q.i} and #${q.j}`;
    }
    pairBox.style.display = q ? "block" : "none";

    const p = this.state.progress;
    el("progress").textContent = p
      ? `queries used: ${p.queries_used} · certain sets: ${p.n_certain_sets}` +
        (p.error !== undefined ? ` · error: ${p.error.toFixed(4)}` : "")
      : "connecting…";

    el("history").textContent = this.state.history
      .map((h) => `${h.queryId}: (${h.i}, ${h.j}) → ${h.mustLink ? "same" : "different"}`)
      .join("\n");

    banner.textContent = bannerText ?? "";
    banner.style.display = bannerText ? "block" : "none";
    el<HTMLButtonElement>("btn-same").disabled = !submitOk;
    el<HTMLButtonElement>("btn-diff").disabled = !submitOk;

    if (isFinished(this.state)) {
      doneBox.style.display = "block";
      pairBox.style.display = "none";
      const err = this.state.progress?.error;
      el("final-error").textContent =
        err !== undefined ? `final misclassification rate: ${err.toFixed(6)}` : "session complete";
      el<HTMLAnchorElement>("trace-link").href = this.client.traceUrl(this.state.sessionId);
    } else {
      doneBox.style.display = "none";
    }
  }

  start(): void {
    document.addEventListener("keydown", (e) => void this.onKey(e.key));
    el("btn-same").addEventListener("click", () => void this.onKey("s"));
    el("btn-diff").addEventListener("click", () => void this.onKey("d"));
    void this.poll();
    setInterval(() => void this.poll(), POLL_MS);
  }
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("server") ?? "http://127.0.0.1:8000";
  let sessionId = params.get("session");
  if (!sessionId) {
    const configText = el<HTMLTextAreaElement>("config").value;
    const client = new ApiClient(baseUrl);
    const created = await client.createSession(JSON.parse(configText));
    sessionId = created.id;
    // put the session id in the URL so a reload resumes it
    params.set("session", sessionId);
    window.history.replaceState(null, "", `?${params.toString()}`);
  }
  el("setup").style.display = "none";
  new App(baseUrl, sessionId).start();
}

if (typeof document !== "undefined" && document.getElementById("btn-start")) {
  el("btn-start").addEventListener("click", () => {
    void boot().catch((err) => {
      el("banner").textContent = String(err);
      el("banner").style.display = "block";
    });
  });
  if (new URLSearchParams(window.location.search).get("session")) {
    void boot();
  }
}
