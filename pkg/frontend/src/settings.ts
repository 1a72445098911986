import type { ExtensionSettings, Mode } from "./types";

export const SETTINGS_KEY = "commentguard.settings";

export const DEFAULT_SETTINGS: ExtensionSettings = {
  api_base_url: "http://127.0.0.1:8000",
  mode: "hide",
  enabled: true,
};

/** Minimal async key-value surface so tests and non-extension contexts can
 * substitute storage. */
export interface KeyValueArea {
  get(key: string): Promise<string | null>;
  set(key: string, value: string): Promise<void>;
}

export function memoryArea(initial: Record<string, string> = {}): KeyValueArea {
  const data = new Map(Object.entries(initial));
  return {
    async get(key) {
      return data.get(key) ?? null;
    },
    async set(key, value) {
      data.set(key, value);
    },
  };
}

/** Extension-local storage when running inside a browser extension, plain
 * localStorage otherwise (options page opened as a file, tests). */
export function extensionArea(): KeyValueArea {
  if (typeof chrome !== "undefined" && chrome.storage?.local !== undefined) {
    const local = chrome.storage.local;
    return {
      async get(key) {
        const found = await local.get(key);
        const value = found[key];
        return typeof value === "string" ? value : null;
      },
      async set(key, value) {
        await local.set({ [key]: value });
      },
    };
  }
  return {
    async get(key) {
      return localStorage.getItem(key);
    },
    async set(key, value) {
      localStorage.setItem(key, value);
    },
  };
}

function sanitize(raw: unknown): Partial<ExtensionSettings> {
  if (typeof raw !== "object" || raw === null) {
    return {};
  }
  const candidate = raw as Record<string, unknown>;
  const out: Partial<ExtensionSettings> = {};
  if (typeof candidate.api_base_url === "string" && candidate.api_base_url !== "") {
    out.api_base_url = candidate.api_base_url.replace(/\/+$/, "");
  }
  if (candidate.mode === "mark" || candidate.mode === "hide") {
    out.mode = candidate.mode as Mode;
  }
  if (typeof candidate.enabled === "boolean") {
    out.enabled = candidate.enabled;
  }
  return out;
}

/** Stored values layered over defaults; malformed or missing stored data
 * falls back to defaults field by field. */
export async function loadSettings(area: KeyValueArea): Promise<ExtensionSettings> {
  const stored = await area.get(SETTINGS_KEY);
  if (stored === null) {
    return { ...DEFAULT_SETTINGS };
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(stored);
  } catch {
    return { ...DEFAULT_SETTINGS };
  }
  return { ...DEFAULT_SETTINGS, ...sanitize(parsed) };
}

export async function saveSettings(
  area: KeyValueArea,
  settings: ExtensionSettings,
): Promise<void> {
  await area.set(SETTINGS_KEY, JSON.stringify(settings));
}
