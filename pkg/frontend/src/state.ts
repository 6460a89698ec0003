// View-state machine. Pure: every transition is a function of the previous
// state plus one server response or key press, so the UI can be rebuilt from
// scratch (page reload) by re-polling the server.

import type { NextResponse, PendingQuery, SessionState } from "./api.js";
import { isDone } from "./api.js";

export interface AnsweredPair {
  queryId: string;
  i: number;
  j: number;
  mustLink: boolean;
}

export interface ViewState {
  sessionId: string;
  pending: PendingQuery | null;
  // query id currently being posted; blocks further submissions
  inFlight: string | null;
  // every query id ever submitted, the duplicate-submission guard
  submitted: Set<string>;
  history: AnsweredPair[];
  progress: SessionState | null;
  finalLabels: number[] | null;
  banner: string | null;
}

export function initialState(sessionId: string): ViewState {
  return {
    sessionId,
    pending: null,
    inFlight: null,
    submitted: new Set(),
    history: [],
    progress: null,
    finalLabels: null,
    banner: null,
  };
}

export function applyNext(state: ViewState, r: NextResponse): ViewState {
  if (isDone(r)) {
    return { ...state, pending: null, finalLabels: r.final_labels };
  }
  // keep the current pair while an answer for it is still in flight
  if (state.inFlight !== null && state.pending?.query_id === state.inFlight) {
    return state;
  }
  return { ...state, pending: r, banner: null };
}

/** A key press ("s" same / "d" different) becomes a submission only when a
 * pair is displayed and its id has never been submitted before. */
export function trySubmit(
  state: ViewState,
  key: string,
): { state: ViewState; submit: { queryId: string; mustLink: boolean } | null } {
  if (key !== "s" && key !== "d") return { state, submit: null };
  const q = state.pending;
  if (!q || state.inFlight !== null || state.submitted.has(q.query_id)) {
    return { state, submit: null };
  }
  const submitted = new Set(state.submitted);
  submitted.add(q.query_id);
  return {
    state: { ...state, inFlight: q.query_id, submitted },
    submit: { queryId: q.query_id, mustLink: key === "s" },
  };
}

export function applyAnswerResult(
  state: ViewState,
  queryId: string,
  mustLink: boolean,
  result: { status: string; reason?: string },
): ViewState {
  const cleared: ViewState = { ...state, inFlight: null, pending: null };
  if (result.status === "accepted") {
    const q = state.pending;
    const pair: AnsweredPair = {
      queryId,
      i: q?.query_id === queryId ? q.i : -1,
      j: q?.query_id === queryId ? q.j : -1,
      mustLink,
    };
    return { ...cleared, history: [...state.history, pair] };
  }
  // stale or done: drop the pair silently and let polling resync
  return cleared;
}

export function applyProgress(state: ViewState, s: SessionState): ViewState {
  return { ...state, progress: s };
}

export function setBanner(state: ViewState, message: string | null): ViewState {
  return { ...state, banner: message };
}

export function isFinished(state: ViewState): boolean {
  return state.finalLabels !== null || state.progress?.phase === "done";
}
