export type Verdict = "fraud" | "genuine";

export type Mode = "mark" | "hide";

/** One rendered comment tied to its live document element. */
export interface CommentNode {
  key: string;
  text: string;
  element: HTMLElement;
}

export interface ClassifiedComment {
  label: Verdict;
  score: number;
  model: string;
}

export interface BatchItemError {
  error: string;
}

/** One slot of a /scam/batch response, order-aligned with the request. */
export type BatchItem = ClassifiedComment | BatchItemError;

export function isClassified(item: BatchItem): item is ClassifiedComment {
  return (item as ClassifiedComment).label !== undefined;
}

export interface ExtensionSettings {
  api_base_url: string;
  mode: Mode;
  enabled: boolean;
}
