/** Reconnecting WebSocket subscription to a session's live channel. */

import type { LiveMessage } from './types.js';

export interface LiveChannelCallbacks {
  onMessage: (message: LiveMessage) => void;
  /** connection lost: the view shows a stale-data banner until reconnect */
  onStale: (stale: boolean) => void;
  onEnd?: () => void;
}

export class LiveChannel {
  private ws: WebSocket | null = null;
  private attempts = 0;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly callbacks: LiveChannelCallbacks,
  ) {
    this.connect();
  }

  private connect(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.attempts = 0;
      this.callbacks.onStale(false);
    };
    this.ws.onmessage = (event) => {
      this.callbacks.onMessage(JSON.parse(event.data) as LiveMessage);
    };
    this.ws.onclose = (event) => {
      this.ws = null;
      if (this.closed) {
        return;
      }
      if (event.code === 1000) {
        this.callbacks.onEnd?.();
        return;
      }
      this.callbacks.onStale(true);
      this.reconnect();
    };
  }

  private reconnect(): void {
    const timeout = Math.min(1000 * 2 ** this.attempts, 15000);
    setTimeout(() => {
      if (!this.closed) {
        this.attempts += 1;
        this.connect();
      }
    }, timeout);
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}

export function backoffMs(attempt: number): number {
  return Math.min(1000 * 2 ** attempt, 15000);
}
