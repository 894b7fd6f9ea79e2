/**
 * Browser entry point. Serve the backend with `netcontrast serve`, build
 * with `npm run build`, then open index.html; query parameters pick the
 * dataset pair, e.g. ?target=karate&background=random1.
 */

import { createApp } from "./app.js";
import { SessionClient, WebSocketTransport } from "./protocol.js";

const params = new URLSearchParams(window.location.search);
const host = params.get("service") ?? `ws://${window.location.hostname}:8040/ws`;
const target = params.get("target") ?? "karate";
const background = params.get("background") ?? "random1";

const transport = new WebSocketTransport(host);
const client = new SessionClient(transport);
const app = createApp(
  document.getElementById("app") ?? document.body, client, transport);

transport.onStateChange((state) => {
  if (state === "open") {
    void app.loadPair(target, background);
  }
});
