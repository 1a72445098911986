import { classifyBatch, submitReport, type FetchLike } from "./api";
import {
  KEY_ATTR,
  REPORT_CLASS,
  VERDICT_ATTR,
  applyMode,
  ensureStyles,
  teardown,
} from "./apply";
import { UI_ATTR, extractComments, instagramAdapter, type SelectorAdapter } from "./scanner";
import type { CommentNode, ExtensionSettings, Mode, Verdict } from "./types";
import { isClassified } from "./types";

export const DEBOUNCE_MS = 400;
export const NOTICE_CLASS = "cg-notice";
const NOTICE_MS = 2500;

export interface ControllerDeps {
  adapter?: SelectorAdapter;
  fetchFn?: FetchLike;
  debounceMs?: number;
  now?: () => Date;
}

/** Orchestrates the content script: scans for comments, fetches verdicts in
 * one batch per debounce window, applies the active mode, and forwards
 * report clicks. Page text goes only to the configured service URL. */
export class ContentController {
  private readonly adapter: SelectorAdapter;
  private readonly fetchFn: FetchLike;
  private readonly debounceMs: number;
  private readonly now: () => Date;

  private readonly seen = new Set<string>();
  private readonly inFlight = new Set<string>();
  private readonly nodes = new Map<string, CommentNode>();
  private readonly verdicts = new Map<string, Verdict>();

  private observer: MutationObserver | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private readonly onClick = (event: Event) => {
    void this.handleClick(event);
  };

  constructor(
    private readonly doc: Document,
    private readonly settings: ExtensionSettings,
    deps: ControllerDeps = {},
  ) {
    this.adapter = deps.adapter ?? instagramAdapter;
    this.fetchFn = deps.fetchFn ?? ((input, init) => fetch(input, init));
    this.debounceMs = deps.debounceMs ?? DEBOUNCE_MS;
    this.now = deps.now ?? (() => new Date());
  }

  /** Initial scan plus mutation-driven re-scans and report-click handling. */
  start(): void {
    if (!this.settings.enabled) {
      return;
    }
    this.doc.addEventListener("click", this.onClick);
    this.observer = new MutationObserver(() => this.scheduleScan());
    this.observer.observe(this.doc.body, {
      childList: true,
      subtree: true,
      characterData: true,
    });
    void this.scan();
  }

  /** Coalesces bursts of mutations into a single scan (and so at most one
   * batch request) per debounce window. */
  scheduleScan(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.scan();
    }, this.debounceMs);
  }

  async scan(): Promise<void> {
    if (!this.settings.enabled) {
      return;
    }
    const fresh = extractComments(this.doc, this.adapter, this.seen).filter(
      (node) => !this.inFlight.has(node.key),
    );
    if (fresh.length === 0) {
      return;
    }
    for (const node of fresh) {
      this.inFlight.add(node.key);
    }
    try {
      const items = await classifyBatch(
        fresh.map((node) => node.text),
        this.settings,
        this.fetchFn,
      );
      fresh.forEach((node, index) => {
        this.seen.add(node.key);
        const item = items[index];
        if (item !== undefined && isClassified(item)) {
          this.nodes.set(node.key, node);
          this.verdicts.set(node.key, item.label);
        }
      });
      this.apply();
    } catch (error) {
      // leave the page untouched; the next mutation retriggers a scan
      console.error("comment classification request failed", error);
      for (const node of fresh) {
        this.seen.delete(node.key);
      }
    } finally {
      for (const node of fresh) {
        this.inFlight.delete(node.key);
      }
    }
  }

  apply(): void {
    ensureStyles(this.doc);
    applyMode(Array.from(this.nodes.values()), this.verdicts, this.settings);
  }

  setMode(mode: Mode): void {
    this.settings.mode = mode;
    this.apply();
  }

  /** Clean teardown: stops observing, removes every injected style, badge,
   * and attribute, and unhides everything. */
  disable(): void {
    this.settings.enabled = false;
    this.observer?.disconnect();
    this.observer = null;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.doc.removeEventListener("click", this.onClick);
    teardown(this.doc);
    this.seen.clear();
    this.inFlight.clear();
    this.nodes.clear();
    this.verdicts.clear();
  }

  private async handleClick(event: Event): Promise<void> {
    const target = event.target as HTMLElement | null;
    const button = target?.closest?.(`.${REPORT_CLASS}`);
    if (!(button instanceof HTMLElement)) {
      return;
    }
    const holder = button.closest(`[${KEY_ATTR}]`);
    if (!(holder instanceof HTMLElement)) {
      return;
    }
    const key = holder.getAttribute(KEY_ATTR);
    const predicted = holder.getAttribute(VERDICT_ATTR) as Verdict | null;
    const node = key !== null ? this.nodes.get(key) : undefined;
    if (node === undefined || predicted === null) {
      return;
    }
    const reported: Verdict = predicted === "fraud" ? "genuine" : "fraud";
    const accepted = await submitReport(
      { comment: node.text, predicted, reported },
      this.settings,
      this.fetchFn,
      this.now,
    );
    this.showNotice(accepted ? "report sent, thanks" : "report failed, try again later");
  }

  /** Brief non-blocking toast; never touches comment content. */
  private showNotice(message: string): void {
    const notice = this.doc.createElement("div");
    notice.className = NOTICE_CLASS;
    notice.setAttribute(UI_ATTR, "");
    notice.textContent = message;
    notice.style.cssText =
      "position:fixed;bottom:12px;right:12px;background:#333;color:#fff;" +
      "padding:6px 10px;border-radius:4px;font-size:12px;z-index:99999;";
    this.doc.body.appendChild(notice);
    setTimeout(() => notice.remove(), NOTICE_MS);
  }
}
