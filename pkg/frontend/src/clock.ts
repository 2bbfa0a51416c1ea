// Session-relative timing. The server anchors its session clock while
// handling the create request, somewhere between our send and receive
// instants; anchoring at the midpoint of that round trip bounds the
// client-server skew by half the RTT.

export class SessionClock {
  private anchorMs: number | null = null;

  anchor(): void {
    this.anchorMs = performance.now();
  }

  /** Anchor at the midpoint of a request round trip (performance.now values). */
  anchorBetween(sentMs: number, receivedMs: number): void {
    this.anchorMs = (sentMs + receivedMs) / 2;
  }

  isAnchored(): boolean {
    return this.anchorMs !== null;
  }

  now(): number {
    if (this.anchorMs === null) {
      throw new Error("session clock is not anchored");
    }
    return Math.max(0, Math.round(performance.now() - this.anchorMs));
  }
}
