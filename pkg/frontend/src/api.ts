import type { BatchItem, ExtensionSettings, Verdict } from "./types";

/** Server-side batch ceiling; larger scans are chunked. */
export const MAX_BATCH = 200;

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function jsonPost(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

/** Classifies texts via POST /scam/batch, chunking above the server ceiling.
 * Results come back order-aligned with the input. */
export async function classifyBatch(
  texts: readonly string[],
  settings: ExtensionSettings,
  fetchFn: FetchLike = fetch,
): Promise<BatchItem[]> {
  const results: BatchItem[] = [];
  for (let start = 0; start < texts.length; start += MAX_BATCH) {
    const chunk = texts.slice(start, start + MAX_BATCH);
    const response = await fetchFn(`${settings.api_base_url}/scam/batch`, jsonPost({ comments: chunk }));
    if (!response.ok) {
      throw new Error(`batch classification failed with status ${response.status}`);
    }
    const body = (await response.json()) as { results: BatchItem[] };
    results.push(...body.results);
  }
  return results;
}

export interface Report {
  comment: string;
  predicted: Verdict;
  reported: Verdict;
}

/** Submits a misclassification report to POST /report.
 *
 * A network failure is retried once; an HTTP-level rejection is not (the
 * server has already answered). Returns whether the report was accepted.
 */
export async function submitReport(
  report: Report,
  settings: ExtensionSettings,
  fetchFn: FetchLike = fetch,
  now: () => Date = () => new Date(),
): Promise<boolean> {
  const body = { ...report, client_ts: now().toISOString() };
  for (let attempt = 0; attempt < 2; attempt++) {
    try {
      const response = await fetchFn(`${settings.api_base_url}/report`, jsonPost(body));
      return response.status === 202;
    } catch {
      // network failure; loop retries exactly once
    }
  }
  return false;
}
