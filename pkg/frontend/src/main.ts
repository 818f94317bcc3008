import { ApiClient } from "./api";
import { initApp } from "./app";
import "./style.css";

/** API base URL: build-time env var first, then the optional runtime
 * config file next to the bundle, else same-origin. */
async function resolveApiBase(): Promise<string> {
  const fromEnv = import.meta.env.VITE_API_BASE as string | undefined;
  if (fromEnv) return fromEnv;
  try {
    const response = await fetch("./config.json");
    if (response.ok) {
      const config = (await response.json()) as { apiBase?: string };
      if (config.apiBase) return config.apiBase;
    }
  } catch {
    // no runtime config shipped; same-origin it is
  }
  return "";
}

async function bootstrap(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const apiBase = await resolveApiBase();
  initApp(root, new ApiClient(apiBase));
}

void bootstrap();
