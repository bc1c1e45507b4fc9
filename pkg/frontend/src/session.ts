// DOM-free drawing session: groups pointer contacts into strokes, posts
// the growing glyph at a bounded rate while drawing, ends the glyph after
// an idle timeout, and reconciles out-of-order responses by sequence
// number.  The DOM layer in main.ts only forwards events and renders.

import type {
  CanvasStroke,
  InferenceRequest,
  InferenceResponse,
  LivePrediction,
  ModelName,
  TouchSample,
} from "./types.js";
import { UNIFORM_PREDICTION } from "./types.js";

export interface SessionHooks {
  /** Post a request; resolve with the response or null on failure. */
  post: (request: InferenceRequest, seq: number) => void;
  /** A digit was confirmed (checkmark tap or idle commit). */
  commit: (digit: number) => void;
  /** Redraw needed (strokes or prediction changed). */
  render: () => void;
}

export interface SessionOptions {
  model?: ModelName;
  idleCommitMs?: number; // glyph ends after this much post-release idle
  minPostIntervalMs?: number; // rate limit for partial posts while drawing
  now?: () => number;
}

export class GlyphSession {
  readonly strokes: CanvasStroke[] = [];
  prediction: LivePrediction = UNIFORM_PREDICTION;
  model: ModelName;

  private readonly idleCommitMs: number;
  private readonly minPostIntervalMs: number;
  private readonly now: () => number;
  private readonly hooks: SessionHooks;

  private gestureEpoch: number | null = null;
  private lastPartialPost = -Infinity;
  private idleTimer: ReturnType<typeof setTimeout> | null = null;
  private seq = 0;
  private appliedSeq = 0;
  private glyphEnded = false;

  constructor(hooks: SessionHooks, options: SessionOptions = {}) {
    this.hooks = hooks;
    this.model = options.model ?? "polar1d";
    this.idleCommitMs = options.idleCommitMs ?? 600;
    this.minPostIntervalMs = options.minPostIntervalMs ?? 100;
    this.now = options.now ?? (() => performance.now());
  }

  /** Timestamps are relative to the first contact of the glyph. */
  private timestamp(): number {
    if (this.gestureEpoch === null) this.gestureEpoch = this.now();
    return this.now() - this.gestureEpoch;
  }

  pointerDown(x: number, y: number): void {
    if (this.glyphEnded) this.clear();
    this.cancelIdleTimer();
    const t = this.timestamp();
    this.strokes.push({ points: [{ x, y, t }], active: true });
    this.hooks.render();
  }

  pointerMove(x: number, y: number): void {
    const stroke = this.strokes[this.strokes.length - 1];
    if (!stroke || !stroke.active) return;
    const prev = stroke.points[stroke.points.length - 1];
    // monotone timestamps within a stroke by construction
    const t = Math.max(this.timestamp(), prev.t);
    stroke.points.push({ x, y, t });
    const wall = this.now();
    if (wall - this.lastPartialPost >= this.minPostIntervalMs) {
      this.lastPartialPost = wall;
      this.postCurrent(true);
    }
    this.hooks.render();
  }

  pointerUp(): void {
    const stroke = this.strokes[this.strokes.length - 1];
    if (!stroke || !stroke.active) return;
    stroke.active = false;
    this.postCurrent(true);
    this.idleTimer = setTimeout(() => this.endGlyph(), this.idleCommitMs);
    this.hooks.render();
  }

  /** Confirmation tap: commit the current top digit immediately. */
  confirm(): void {
    if (this.isEmpty()) return;
    this.cancelIdleTimer();
    if (this.hasPrediction()) {
      this.hooks.commit(this.prediction.top);
    }
    this.clear();
  }

  /** Idle timeout fired: final full-glyph post, then commit.  Without any
   * service response (unreachable), the input is discarded instead. */
  private endGlyph(): void {
    this.idleTimer = null;
    this.glyphEnded = true;
    this.postCurrent(false);
    if (this.hasPrediction()) {
      this.hooks.commit(this.prediction.top);
    } else {
      this.clear();
    }
    this.hooks.render();
  }

  /** True once a service response has been applied to this glyph. */
  hasPrediction(): boolean {
    return this.prediction.updatedAt > 0;
  }

  clear(): void {
    this.cancelIdleTimer();
    this.strokes.length = 0;
    this.gestureEpoch = null;
    this.glyphEnded = false;
    this.prediction = UNIFORM_PREDICTION;
    this.lastPartialPost = -Infinity;
    this.hooks.render();
  }

  isEmpty(): boolean {
    return this.strokes.length === 0;
  }

  buildRequest(partial: boolean): InferenceRequest {
    return {
      model: this.model,
      strokes: this.strokes.map((s) => s.points.map((p) => ({ x: p.x, y: p.y, t: p.t }))),
      partial,
    };
  }

  private postCurrent(partial: boolean): void {
    if (this.isEmpty()) return;
    this.seq += 1;
    this.hooks.post(this.buildRequest(partial), this.seq);
  }

  /**
   * Apply a service response; stale sequence numbers never overwrite a
   * newer prediction.  Returns whether it was applied.
   */
  offerResponse(seq: number, response: InferenceResponse): boolean {
    if (seq <= this.appliedSeq) return false;
    this.appliedSeq = seq;
    this.prediction = {
      probabilities: response.probabilities.slice(),
      top: response.top,
      updatedAt: this.now(),
    };
    this.hooks.render();
    return true;
  }

  private cancelIdleTimer(): void {
    if (this.idleTimer !== null) {
      clearTimeout(this.idleTimer);
      this.idleTimer = null;
    }
  }
}
