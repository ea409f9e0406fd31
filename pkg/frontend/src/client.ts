/**
 * Sequence-numbered what-if client.
 *
 * Every request gets an increasing sequence number; a response is rendered
 * only if it belongs to the most recently issued request, so out-of-order
 * arrivals can never overwrite fresher data. The raw response text is kept
 * so views can show the service's numbers byte-for-byte.
 */
import { WhatIfResponse } from "./types.js";

export interface FetchLike {
  (url: string, init?: { method?: string; headers?: Record<string, string>; body?: string }): Promise<{
    ok: boolean;
    status: number;
    text(): Promise<string>;
  }>;
}

export interface WhatIfResult {
  seq: number;
  raw: string;
  body: WhatIfResponse;
}

export class WhatIfClient {
  private seq = 0;

  constructor(
    private readonly baseUrl: string,
    private readonly fetcher: FetchLike,
    private readonly onResult: (result: WhatIfResult) => void,
    private readonly onError: (message: string, status?: number) => void,
  ) {}

  get lastIssued(): number {
    return this.seq;
  }

  async request(fractions: Record<string, number>, totalSteam?: number): Promise<void> {
    const id = ++this.seq;
    const payload: Record<string, unknown> = { fractions };
    if (totalSteam !== undefined) payload.total_steam = totalSteam;
    let raw: string;
    let status: number;
    let ok: boolean;
    try {
      const response = await this.fetcher(`${this.baseUrl}/whatif`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      });
      ok = response.ok;
      status = response.status;
      raw = await response.text();
    } catch (err) {
      if (id === this.seq) this.onError(`network failure: ${String(err)}`);
      return;
    }
    if (id !== this.seq) return; // superseded while in flight
    if (!ok) {
      this.onError(extractDetail(raw) ?? `service error ${status}`, status);
      return;
    }
    this.onResult({ seq: id, raw, body: JSON.parse(raw) as WhatIfResponse });
  }
}

function extractDetail(raw: string): string | undefined {
  try {
    const parsed = JSON.parse(raw) as { detail?: unknown; error?: unknown };
    if (typeof parsed.detail === "string") return parsed.detail;
    if (typeof parsed.error === "string") return parsed.error;
  } catch {
    /* non-JSON error body */
  }
  return undefined;
}

/**
 * The exact number token for `key` in a JSON response body. Rendering from
 * the raw text rather than a re-serialized float keeps the display
 * byte-identical to what the service sent.
 */
export function rawNumberToken(raw: string, key: string): string {
  const match = raw.match(new RegExp(`"${key}"\\s*:\\s*(-?[0-9][0-9.eE+-]*)`));
  if (!match) throw new Error(`response has no numeric field ${JSON.stringify(key)}`);
  return match[1];
}
