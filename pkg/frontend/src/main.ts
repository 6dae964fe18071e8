// Application wiring: canvas, mode selector, input capture, websocket,
// render loop. All game state is authoritative on the server; this file
// only forwards inputs and draws committed snapshots.

import { KeyboardGazeProxy, PointerLagProxy } from "./gazeProxy.js";
import { InputCapture } from "./input.js";
import { configureMessage, helloMessage, MODES, startMessage, type Mode } from "./protocol.js";
import { DEFAULT_GEOMETRY, render, type GameGeometry } from "./render.js";
import { Connection } from "./net.js";
import { ViewState } from "./viewState.js";

const canvas = document.getElementById("game") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const modeBar = document.getElementById("modes")!;
const startButton = document.getElementById("start") as HTMLButtonElement;
const gazeToggle = document.getElementById("gaze-toggle") as HTMLInputElement;
const proxySelect = document.getElementById("gaze-proxy") as HTMLSelectElement;

const view = new ViewState();
let geometry: GameGeometry = { ...DEFAULT_GEOMETRY };

const pointerProxy = new PointerLagProxy(100);
const keyboardProxy = new KeyboardGazeProxy();
const input = new InputCapture(pointerProxy);

const wsUrl = `ws://${location.hostname}:8000/ws`;
const conn = new Connection(wsUrl);

// --- mode selector ---------------------------------------------------------

const modeButtons = new Map<Mode, HTMLButtonElement>();
for (const mode of MODES) {
  const button = document.createElement("button");
  button.textContent = mode;
  button.onclick = () => selectMode(mode);
  modeBar.appendChild(button);
  modeButtons.set(mode, button);
}

function refreshControls(): void {
  for (const [mode, button] of modeButtons) {
    button.classList.toggle("active", mode === view.selectedMode);
    button.disabled = view.connection !== "connected";
  }
  startButton.disabled = view.connection !== "connected" || view.session !== "configured";
  startButton.textContent = view.session === "running" ? "running..." : "start trial";
}

function selectMode(mode: Mode): void {
  if (!view.canConfigure()) {
    view.showToast("cannot change mode while a trial runs", performance.now());
    return;
  }
  view.selectedMode = mode;
  conn.send(configureMessage(mode));
}

startButton.onclick = () => {
  if (view.session === "configured") {
    conn.send(startMessage());
  }
};

gazeToggle.onchange = () => {
  view.showGazeMarker = gazeToggle.checked;
};

proxySelect.onchange = () => {
  input.setProxy(proxySelect.value === "keyboard" ? keyboardProxy : pointerProxy);
};

// --- network ---------------------------------------------------------------

conn.onstatus = (connected) => {
  view.connection = connected ? "connected" : "disconnected";
  if (connected) {
    conn.send(helloMessage());
    conn.send(configureMessage(view.selectedMode));
  }
  refreshControls();
};

conn.onmessage = (msg) => {
  view.apply(msg, performance.now());
  if (msg.kind === "configure" && msg.ok) {
    const game = (msg as unknown as { game?: Record<string, number> }).game;
    if (game !== undefined) {
      geometry = {
        screenWidth: game.screen_width ?? geometry.screenWidth,
        screenHeight: game.screen_height ?? geometry.screenHeight,
        targetRadius: game.target_radius ?? geometry.targetRadius,
        laserRange: game.laser_range ?? geometry.laserRange,
        trialDuration: game.trial_duration ?? geometry.trialDuration,
      };
    }
  }
  if (msg.kind === "end") {
    refreshControls();
    // a new trial can be configured now
    view.session = "ended";
  }
  refreshControls();
};

conn.open();

// --- input capture -----------------------------------------------------------

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  input.pointerMove(ev.clientX, ev.clientY, rect, performance.now());
});
canvas.addEventListener("pointerdown", (ev) => {
  if (ev.button === 0) input.pointerButton(true);
});
window.addEventListener("pointerup", (ev) => {
  if (ev.button === 0) input.pointerButton(false);
});
canvas.addEventListener("contextmenu", (ev) => ev.preventDefault());
window.addEventListener("keydown", (ev) => {
  if (input.key(ev.key)) ev.preventDefault();
});

// input messages at 60/s while running (>= 30/s requirement)
setInterval(() => {
  if (view.session === "running") {
    conn.send(input.message(performance.now()));
  }
}, 1000 / 60);

// --- render loop --------------------------------------------------------------

function frame(): void {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth;
  const h = canvas.clientHeight;
  if (canvas.width !== w * dpr || canvas.height !== h * dpr) {
    canvas.width = w * dpr;
    canvas.height = h * dpr;
  }
  ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  render(ctx, view, geometry, w, h, performance.now());
  requestAnimationFrame(frame);
}

refreshControls();
requestAnimationFrame(frame);
