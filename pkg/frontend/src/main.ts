// Page bootstrap: open a session against a running engine service
// (`intentlang serve --http --listen 127.0.0.1:8123 --world-dir ...`)
// and mount the chosen view.

import { mountBirdseye } from "./birdseye.js";
import { mountHypertext } from "./hypertext.js";
import { ProtocolClient } from "./protocol.js";

async function start(): Promise<void> {
  const app = document.getElementById("app");
  if (app === null) {
    throw new Error("missing #app container");
  }
  const params = new URLSearchParams(window.location.search);
  const endpoint = params.get("engine") ?? "http://127.0.0.1:8123";
  const world = params.get("world") ?? "move_take.world";
  const profile = params.get("profile") ?? "hypertext";
  const seed = Number(params.get("seed") ?? "0");

  const client = new ProtocolClient(endpoint);
  const session = await client.newSession(world, profile, seed);

  if (profile === "birdseye") {
    const view = mountBirdseye(app, client, session.session);
    await view.refresh();
  } else {
    const view = mountHypertext(app, client, session.session);
    await view.refresh();
  }
}

start().catch((error) => {
  const app = document.getElementById("app");
  if (app !== null) {
    app.textContent = `failed to start: ${String(error)}`;
  }
});
