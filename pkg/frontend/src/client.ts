// HTTP client with the UI's delivery rules: at most one request in flight
// per canvas; newer bodies coalesce over queued ones; failures retry with
// backoff while keeping the UI responsive.

import type { InferenceRequest, InferenceResponse } from "./types.js";

export type FetchLike = (url: string, init: RequestInit) => Promise<Response>;

export interface ClientOptions {
  fetchFn?: FetchLike;
  backoffMs?: number[]; // retry schedule on network failure
  onResult?: (seq: number, response: InferenceResponse) => void;
  onStatus?: (healthy: boolean) => void;
}

interface Pending {
  body: InferenceRequest;
  seq: number;
}

export class InferenceClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  private readonly backoffMs: number[];
  private readonly onResult: (seq: number, response: InferenceResponse) => void;
  private readonly onStatus: (healthy: boolean) => void;

  private inFlight = false;
  private queued: Pending | null = null;
  private retryAttempt = 0;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(baseUrl: string, options: ClientOptions = {}) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = options.fetchFn ?? ((url, init) => fetch(url, init));
    this.backoffMs = options.backoffMs ?? [250, 500, 1000, 2000];
    this.onResult = options.onResult ?? (() => {});
    this.onStatus = options.onStatus ?? (() => {});
  }

  async health(): Promise<boolean> {
    try {
      const response = await this.fetchFn(`${this.baseUrl}/api/health`, { method: "GET" });
      const ok = response.ok;
      this.onStatus(ok);
      return ok;
    } catch {
      this.onStatus(false);
      return false;
    }
  }

  /** Submit a request; if one is in flight, only the newest waits. */
  submit(body: InferenceRequest, seq: number): void {
    this.queued = { body, seq };
    if (!this.inFlight && this.retryTimer === null) {
      void this.drain();
    }
  }

  private async drain(): Promise<void> {
    while (this.queued !== null) {
      const pending = this.queued;
      this.queued = null;
      this.inFlight = true;
      try {
        const response = await this.fetchFn(`${this.baseUrl}/api/infer`, {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(pending.body),
        });
        if (response.ok) {
          const payload = (await response.json()) as InferenceResponse;
          this.retryAttempt = 0;
          this.onStatus(true);
          this.onResult(pending.seq, payload);
        } else {
          // 4xx: the request itself is unusable (e.g. single point);
          // report healthy and drop it
          this.retryAttempt = 0;
          this.onStatus(true);
        }
      } catch {
        this.onStatus(false);
        this.scheduleRetry(pending);
        break;
      } finally {
        this.inFlight = false;
      }
    }
  }

  private scheduleRetry(pending: Pending): void {
    // keep only the newest body; the retry resubmits whatever is latest
    if (this.queued === null) this.queued = pending;
    const delay = this.backoffMs[Math.min(this.retryAttempt, this.backoffMs.length - 1)];
    this.retryAttempt += 1;
    this.retryTimer = setTimeout(() => {
      this.retryTimer = null;
      void this.drain();
    }, delay);
  }
}
