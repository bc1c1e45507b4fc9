// Stroke capture and commit flow: contact grouping, monotone timestamps,
// post cadence, idle commit, stale-response rejection.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { GlyphSession } from "../src/session.js";
import type { InferenceRequest } from "../src/types.js";

interface Recorded {
  posts: { request: InferenceRequest; seq: number }[];
  commits: number[];
}

function makeSession(options: { idleCommitMs?: number } = {}) {
  const recorded: Recorded = { posts: [], commits: [] };
  const session = new GlyphSession(
    {
      post: (request, seq) => recorded.posts.push({ request, seq }),
      commit: (digit) => recorded.commits.push(digit),
      render: () => {},
    },
    { now: () => Date.now(), ...options },
  );
  return { session, recorded };
}

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("stroke capture", () => {
  it("press-move-release yields one stroke; two contacts yield two", () => {
    const { session } = makeSession();
    session.pointerDown(0, 0);
    session.pointerMove(5, 5);
    session.pointerUp();
    expect(session.strokes.length).toBe(1);
    session.pointerDown(10, 10);
    session.pointerMove(15, 15);
    session.pointerUp();
    expect(session.strokes.length).toBe(2);
    expect(session.strokes[0].points.length).toBe(2);
  });

  it("timestamps are monotone within each stroke", () => {
    const { session } = makeSession();
    session.pointerDown(0, 0);
    for (let i = 0; i < 20; i++) {
      vi.advanceTimersByTime(7);
      session.pointerMove(i, i);
    }
    session.pointerUp();
    const times = session.strokes[0].points.map((p) => p.t);
    for (let i = 1; i < times.length; i++) {
      expect(times[i]).toBeGreaterThanOrEqual(times[i - 1]);
    }
    expect(times[0]).toBe(0); // relative to gesture start
  });

  it("partial posts are rate-limited to the configured interval", () => {
    const { session, recorded } = makeSession();
    session.pointerDown(0, 0);
    for (let i = 0; i < 50; i++) {
      vi.advanceTimersByTime(10); // 500 ms of movement at 100 Hz
      session.pointerMove(i, i);
    }
    const partialPosts = recorded.posts.filter((p) => p.request.partial);
    expect(partialPosts.length).toBeLessThanOrEqual(6); // ~every 100 ms
    expect(partialPosts.length).toBeGreaterThanOrEqual(4);
  });
});

describe("idle commit", () => {
  it("idling after a glyph posts a final request and commits the digit", () => {
    const { session, recorded } = makeSession();
    session.pointerDown(0, 0);
    session.pointerMove(10, 10);
    session.pointerUp();
    session.offerResponse(recorded.posts.length, {
      probabilities: [0, 0, 0, 0, 0, 0, 0, 0.9, 0.05, 0.05],
      top: 7,
      completion_hint: 1,
    });
    expect(recorded.commits).toEqual([]);
    vi.advanceTimersByTime(600);
    expect(recorded.commits).toEqual([7]);
    const finals = recorded.posts.filter((p) => p.request.partial === false);
    expect(finals.length).toBe(1);
  });

  it("a second contact within the idle window extends the same glyph", () => {
    const { session, recorded } = makeSession();
    session.pointerDown(0, 0);
    session.pointerMove(10, 10);
    session.pointerUp();
    vi.advanceTimersByTime(300);
    session.pointerDown(20, 20); // crossbar of a 7, say
    session.pointerMove(30, 20);
    session.pointerUp();
    expect(recorded.commits).toEqual([]);
    expect(session.strokes.length).toBe(2);
    session.offerResponse(recorded.posts.length, {
      probabilities: [0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
      top: 7,
      completion_hint: 1,
    });
    vi.advanceTimersByTime(600);
    expect(recorded.commits).toEqual([7]);
  });

  it("discards the glyph when no response ever arrived (service down)", () => {
    const { session, recorded } = makeSession();
    session.pointerDown(0, 0);
    session.pointerMove(10, 10);
    session.pointerUp();
    vi.advanceTimersByTime(600); // idle fires with no prediction applied
    expect(recorded.commits).toEqual([]);
    expect(session.isEmpty()).toBe(true);
  });

  it("confirm() commits immediately and clears", () => {
    const { session, recorded } = makeSession();
    session.pointerDown(0, 0);
    session.pointerMove(10, 10);
    session.pointerUp();
    session.offerResponse(99, {
      probabilities: [0.9, ...Array(9).fill(0.1 / 9)],
      top: 0,
      completion_hint: 0.4,
    });
    session.confirm();
    expect(recorded.commits).toEqual([0]);
    expect(session.isEmpty()).toBe(true);
  });
});

describe("response reconciliation", () => {
  it("older sequence numbers never overwrite newer predictions", () => {
    const { session } = makeSession();
    session.pointerDown(0, 0);
    session.pointerMove(5, 5);
    const newer = {
      probabilities: [0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
      top: 5,
      completion_hint: 1,
    };
    const older = {
      probabilities: [1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
      top: 0,
      completion_hint: 0.2,
    };
    expect(session.offerResponse(4, newer)).toBe(true);
    expect(session.offerResponse(2, older)).toBe(false);
    expect(session.prediction.top).toBe(5);
  });

  it("clearing the canvas resets prediction to uniform", () => {
    const { session } = makeSession();
    session.pointerDown(0, 0);
    session.pointerMove(5, 5);
    session.offerResponse(1, {
      probabilities: [0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
      top: 1,
      completion_hint: 1,
    });
    session.clear();
    expect(session.prediction.probabilities).toEqual(Array(10).fill(0.1));
    expect(session.isEmpty()).toBe(true);
  });
});
