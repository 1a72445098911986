import {
  DEFAULT_SETTINGS,
  extensionArea,
  loadSettings,
  saveSettings,
  type KeyValueArea,
} from "./settings";
import type { ExtensionSettings, Mode } from "./types";

/** Wires the options form: populate from stored settings, persist on save. */
export async function initOptionsPage(
  doc: Document,
  area: KeyValueArea = extensionArea(),
): Promise<void> {
  const form = doc.querySelector<HTMLFormElement>("#settings-form");
  const urlInput = doc.querySelector<HTMLInputElement>("#api-base-url");
  const modeSelect = doc.querySelector<HTMLSelectElement>("#mode");
  const enabledInput = doc.querySelector<HTMLInputElement>("#enabled");
  const status = doc.querySelector<HTMLElement>("#status");
  if (form === null || urlInput === null || modeSelect === null || enabledInput === null) {
    return;
  }

  const settings = await loadSettings(area);
  urlInput.value = settings.api_base_url;
  modeSelect.value = settings.mode;
  enabledInput.checked = settings.enabled;

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const next: ExtensionSettings = {
      api_base_url:
        urlInput.value.trim().replace(/\/+$/, "") || DEFAULT_SETTINGS.api_base_url,
      mode: (modeSelect.value === "mark" ? "mark" : "hide") as Mode,
      enabled: enabledInput.checked,
    };
    void saveSettings(area, next).then(() => {
      if (status !== null) {
        status.textContent = "saved";
      }
    });
  });
}

if (typeof document !== "undefined" && document.querySelector("#settings-form") !== null) {
  void initOptionsPage(document);
}
