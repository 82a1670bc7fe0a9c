/**
 * Entry point: build the panel, open WebSocket transports toward the
 * bridge address typed into the connect box.
 */

import { WebSocketTransport } from "./transport.js";
import { buildUi, UiController } from "./ui.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const controller = new UiController(buildUi(root), {
  connect: (address) => WebSocketTransport.connect(address),
  defaultAddress: "ws://127.0.0.1:7610",
});

// Handy for poking at the panel from the browser console.
(window as unknown as Record<string, unknown>).panel = controller;
