import { UI_ATTR } from "./scanner";
import type { CommentNode, ExtensionSettings, Verdict } from "./types";

export const STYLE_ID = "cg-styles";
export const BADGE_CLASS = "cg-badge";
export const REPORT_CLASS = "cg-report";
export const FRAUD_CLASS = "cg-fraud";
export const GENUINE_CLASS = "cg-genuine";
export const HIDDEN_CLASS = "cg-hidden";
export const KEY_ATTR = "data-cg-key";
export const VERDICT_ATTR = "data-cg-verdict";

const OWN_CLASSES = [FRAUD_CLASS, GENUINE_CLASS, HIDDEN_CLASS];

const STYLE_TEXT = `
.${BADGE_CLASS} { background: #d62828; border-radius: 3px; color: #fff; font-size: 11px; margin-left: 6px; padding: 1px 5px; }
.${FRAUD_CLASS} { outline: 1px solid #d62828; }
.${GENUINE_CLASS} { border-left: 2px solid #9ad1a5; padding-left: 2px; }
.${HIDDEN_CLASS} { display: none !important; }
.${REPORT_CLASS} { background: none; border: none; color: #777; cursor: pointer; font-size: 10px; margin-left: 4px; }
`;

export function ensureStyles(doc: Document): void {
  if (doc.getElementById(STYLE_ID) !== null) {
    return;
  }
  const style = doc.createElement("style");
  style.id = STYLE_ID;
  style.setAttribute(UI_ATTR, "");
  style.textContent = STYLE_TEXT;
  doc.head.appendChild(style);
}

function stripInjected(element: HTMLElement): void {
  for (const injected of Array.from(element.querySelectorAll(`[${UI_ATTR}]`))) {
    injected.remove();
  }
  element.classList.remove(...OWN_CLASSES);
  if (element.classList.length === 0) {
    element.removeAttribute("class");
  }
}

function appendBadge(doc: Document, element: HTMLElement): void {
  const badge = doc.createElement("span");
  badge.className = BADGE_CLASS;
  badge.setAttribute(UI_ATTR, "");
  badge.textContent = "fraud";
  element.appendChild(badge);
}

function appendReportButton(doc: Document, element: HTMLElement): void {
  const button = doc.createElement("button");
  button.className = REPORT_CLASS;
  button.setAttribute(UI_ATTR, "");
  button.type = "button";
  button.textContent = "report";
  button.title = "report this classification as wrong";
  element.appendChild(button);
}

/** Applies the chosen mode to every node with a verdict.
 *
 * Mark mode badges fraud comments and subtly styles genuine ones; hide mode
 * hides fraud comments while keeping them in the document so switching back
 * restores them without loss. Nodes detached since the scan are skipped.
 */
export function applyMode(
  nodes: readonly CommentNode[],
  verdicts: ReadonlyMap<string, Verdict>,
  settings: ExtensionSettings,
): void {
  for (const node of nodes) {
    const verdict = verdicts.get(node.key);
    if (verdict === undefined || !node.element.isConnected) {
      continue;
    }
    const element = node.element;
    const doc = element.ownerDocument;
    stripInjected(element);
    element.setAttribute(KEY_ATTR, node.key);
    element.setAttribute(VERDICT_ATTR, verdict);
    if (settings.mode === "mark") {
      if (verdict === "fraud") {
        element.classList.add(FRAUD_CLASS);
        appendBadge(doc, element);
      } else {
        element.classList.add(GENUINE_CLASS);
      }
      appendReportButton(doc, element);
    } else {
      if (verdict === "fraud") {
        element.classList.add(HIDDEN_CLASS);
      } else {
        appendReportButton(doc, element);
      }
    }
  }
}

/** Removes every trace of the extension from the document: injected styles,
 * badges, report buttons, classes, and bookkeeping attributes. */
export function teardown(doc: Document): void {
  doc.getElementById(STYLE_ID)?.remove();
  for (const injected of Array.from(doc.querySelectorAll(`[${UI_ATTR}]`))) {
    injected.remove();
  }
  for (const element of Array.from(doc.querySelectorAll<HTMLElement>(`[${KEY_ATTR}]`))) {
    element.classList.remove(...OWN_CLASSES);
    if (element.classList.length === 0) {
      element.removeAttribute("class");
    }
    element.removeAttribute(KEY_ATTR);
    element.removeAttribute(VERDICT_ATTR);
  }
}
