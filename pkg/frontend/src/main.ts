import { ContentController } from "./content";
import { extensionArea, loadSettings } from "./settings";

// Content-script entry point; kept separate from the controller so tests can
// drive the controller without auto-starting anything on import.
async function bootstrap(): Promise<void> {
  const settings = await loadSettings(extensionArea());
  if (!settings.enabled) {
    return;
  }
  new ContentController(document, settings).start();
}

void bootstrap();
