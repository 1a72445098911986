import type { CommentNode } from "./types";

/** Marks every element this extension injects, so scanning skips them and
 * text extraction ignores them. */
export const UI_ATTR = "data-cg-ui";

/** The host-page selector strategy lives behind this one interface; when the
 * host DOM changes, only an adapter needs updating. */
export interface SelectorAdapter {
  name: string;
  commentElements(root: ParentNode): HTMLElement[];
  commentText(element: HTMLElement): string;
}

/** Comment text without any injected badge/report UI. */
export function ownText(element: HTMLElement): string {
  const clone = element.cloneNode(true) as HTMLElement;
  for (const injected of Array.from(clone.querySelectorAll(`[${UI_ATTR}]`))) {
    injected.remove();
  }
  return (clone.textContent ?? "").trim();
}

export const instagramAdapter: SelectorAdapter = {
  name: "instagram",
  commentElements(root: ParentNode): HTMLElement[] {
    return Array.from(
      root.querySelectorAll<HTMLElement>('ul li span[dir="auto"], [data-comment]'),
    );
  },
  commentText(element: HTMLElement): string {
    return ownText(element);
  },
};

/** 32-bit FNV-1a over "position|text", rendered as fixed-width hex. The key
 * is stable across re-scans of an unchanged page. */
export function commentKey(text: string, position: number): string {
  const input = `${position}|${text}`;
  let hash = 0x811c9dc5;
  for (let i = 0; i < input.length; i++) {
    hash ^= input.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash.toString(16).padStart(8, "0");
}

/** Scans the document for comments not seen before.
 *
 * Selector failures never surface to the page: they log to the extension
 * console and yield an empty list.
 */
export function extractComments(
  root: ParentNode,
  adapter: SelectorAdapter,
  seenKeys: ReadonlySet<string> = new Set(),
): CommentNode[] {
  let elements: HTMLElement[];
  try {
    elements = adapter.commentElements(root);
  } catch (error) {
    console.error(`comment selector "${adapter.name}" failed`, error);
    return [];
  }
  const nodes: CommentNode[] = [];
  elements.forEach((element, position) => {
    if (element.hasAttribute(UI_ATTR) || element.closest(`[${UI_ATTR}]`) !== null) {
      return;
    }
    const text = adapter.commentText(element);
    if (text === "") {
      return;
    }
    const key = commentKey(text, position);
    if (seenKeys.has(key)) {
      return;
    }
    nodes.push({ key, text, element });
  });
  return nodes;
}
