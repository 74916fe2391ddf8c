import { ApiClient, ApiError, OfflineError } from "./api.js";
import { gradeForCell } from "./scale.js";
import type { NextPair, SessionStatus, StudyDoc } from "./types.js";

export type ViewState =
  | { kind: "loading" }
  | {
      kind: "pair";
      pairIndex: number;
      left: { label: string; asset: string | null };
      right: { label: string; asset: string | null };
      answered: number;
      total: number;
      selection: number | null;
      submitting: boolean;
      queued: boolean;
      error: string | null;
    }
  | { kind: "review"; status: SessionStatus }
  | { kind: "complete"; status: SessionStatus }
  | { kind: "fatal"; message: string };

export type Listener = (state: ViewState) => void;

/**
 * Drives one respondent's session against the service.
 *
 * All statistics shown to the respondent (weights, consistency ratio,
 * revision suggestions) come from service responses; the controller only
 * sequences requests and tracks the current selection.
 */
export class SessionController {
  private state: ViewState = { kind: "loading" };
  private sessionId = "";
  private study: StudyDoc | null = null;
  private inFlight = false;

  constructor(
    private readonly api: ApiClient,
    private readonly listener: Listener,
  ) {}

  get current(): ViewState {
    return this.state;
  }

  get session(): string {
    return this.sessionId;
  }

  private emit(state: ViewState): void {
    this.state = state;
    this.listener(state);
  }

  async start(respondent: Record<string, unknown> = {}, seed?: number): Promise<void> {
    this.emit({ kind: "loading" });
    try {
      this.study = await this.api.study();
      const created = await this.api.createSession(respondent, seed);
      this.sessionId = created.session_id;
      await this.advance();
    } catch (err) {
      this.emit({ kind: "fatal", message: String(err) });
    }
  }

  /** Load the current pair (or review/complete screen) from the service. */
  async advance(): Promise<void> {
    const next = await this.api.nextPair(this.sessionId);
    if (next.pair !== null) {
      this.emit(this.pairState(next));
      return;
    }
    const status = await this.api.status(this.sessionId);
    if (status.state === "complete") {
      this.emit({ kind: "complete", status });
    } else {
      this.emit({ kind: "review", status });
    }
  }

  private pairState(next: NextPair): ViewState {
    if (next.pair === null) throw new Error("no pair in response");
    return {
      kind: "pair",
      pairIndex: next.pair.pair_index,
      left: next.pair.left,
      right: next.pair.right,
      answered: next.progress.answered,
      total: next.progress.total,
      selection: null,
      submitting: false,
      queued: false,
      error: null,
    };
  }

  /** Select one of the nine grading cells (exactly one can be active). */
  select(cell: number): void {
    if (this.state.kind !== "pair" || this.state.submitting) return;
    if (cell < 0 || cell > 8) return;
    this.emit({ ...this.state, selection: cell, error: null });
  }

  /**
   * Submit the current selection and move on.
   *
   * Re-entrancy guard: while a submission is in flight further calls are
   * ignored, so a double click posts exactly one judgment. A network
   * failure keeps the selection and flags the state as queued for retry.
   */
  async submitAndAdvance(): Promise<void> {
    const state = this.state;
    if (state.kind !== "pair" || this.inFlight) return;
    if (state.selection === null) {
      this.emit({ ...state, error: "select a cell first" });
      return;
    }
    const grade = gradeForCell(state.selection);
    this.inFlight = true;
    this.emit({ ...state, submitting: true, queued: false, error: null });
    try {
      const status = await this.api.submitJudgment(
        this.sessionId,
        state.pairIndex,
        grade.intensity,
        grade.favored,
      );
      this.inFlight = false;
      if (status.state === "awaiting_review") {
        this.emit({ kind: "review", status });
      } else {
        await this.advance();
      }
    } catch (err) {
      this.inFlight = false;
      if (err instanceof OfflineError) {
        // keep the answer; the respondent can retry without reselecting
        this.emit({ ...state, submitting: false, queued: true, error: null });
        return;
      }
      if (err instanceof ApiError && err.code === "out_of_order") {
        // a retried submission that actually landed: resync with the service
        await this.advance();
        return;
      }
      this.emit({ ...state, submitting: false, error: String(err) });
    }
  }

  /** Retry a queued (offline) submission. */
  async retry(): Promise<void> {
    if (this.state.kind === "pair" && this.state.queued) {
      await this.submitAndAdvance();
    }
  }

  async accept(): Promise<void> {
    if (this.state.kind !== "review") return;
    try {
      const status = await this.api.review(this.sessionId, "accept");
      this.emit({ kind: "complete", status });
    } catch (err) {
      this.emit({ kind: "fatal", message: String(err) });
    }
  }

  /** Reopen pairs (given as profile label pairs) for re-grading. */
  async revise(pairs: { left: string; right: string }[]): Promise<void> {
    if (this.state.kind !== "review" || this.study === null) return;
    const indexOf = new Map(this.study.profiles.map((p, i) => [p.label, i]));
    const indexPairs: number[][] = [];
    for (const { left, right } of pairs) {
      const i = indexOf.get(left);
      const j = indexOf.get(right);
      if (i === undefined || j === undefined) {
        this.emit({ kind: "fatal", message: `unknown profile in revision: ${left}/${right}` });
        return;
      }
      indexPairs.push([i, j]);
    }
    try {
      const status = await this.api.review(this.sessionId, "revise", indexPairs);
      if (status.state === "revising") {
        await this.advance();
      } else {
        this.emit({ kind: "review", status });
      }
    } catch (err) {
      this.emit({ kind: "fatal", message: String(err) });
    }
  }
}
