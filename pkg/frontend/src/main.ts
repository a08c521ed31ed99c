/**
 * Browser entry point: adapts WebSocket onto the session, wires the DOM
 * controls, and runs the render loop. All logic lives in the DOM-free
 * modules; this file only connects widgets to them.
 */

import { StripCharts } from "./charts.js";
import { HandSchematic } from "./hand.js";
import type { SocketLike } from "./session.js";
import { Session } from "./session.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function browserSocket(url: string): SocketLike {
  const ws = new WebSocket(url);
  const like: SocketLike = {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onopen: null,
    onmessage: null,
    onclose: null,
  };
  ws.onopen = () => like.onopen?.();
  ws.onmessage = (event) => like.onmessage?.(String(event.data));
  ws.onclose = () => like.onclose?.();
  ws.onerror = () => like.onclose?.();
  return like;
}

const addressInput = el<HTMLInputElement>("address");
const connectButton = el<HTMLButtonElement>("connect");
const banner = el<HTMLDivElement>("banner");
const statusLine = el<HTMLDivElement>("status");
const flexorSlider = el<HTMLInputElement>("flexor");
const extensorSlider = el<HTMLInputElement>("extensor");
const flexorReadout = el<HTMLSpanElement>("flexor-value");
const extensorReadout = el<HTMLSpanElement>("extensor-value");
const relaxButton = el<HTMLButtonElement>("relax");
const pauseButton = el<HTMLButtonElement>("pause");
const resetButton = el<HTMLButtonElement>("reset");
const presetSelect = el<HTMLSelectElement>("preset");
const scenarioSelect = el<HTMLSelectElement>("scenario");
const playButton = el<HTMLButtonElement>("play");
const jointSelect = el<HTMLSelectElement>("joint");
const latencyLine = el<HTMLDivElement>("latency");

const charts = new StripCharts(
  el<HTMLCanvasElement>("angle-chart"),
  el<HTMLCanvasElement>("activation-chart"),
  el<HTMLCanvasElement>("gate-chart"),
);
const hand = new HandSchematic(el<HTMLCanvasElement>("hand-view"));

let paused = false;
let populatedFor: unknown = null;
let jointOptionsFor = 0;

const session = new Session(browserSocket, { onChange: syncControls });

function syncControls(): void {
  const welcome = session.welcome;
  const controller = session.role === "controller";

  banner.textContent = session.lastError ?? "";
  banner.style.display = session.lastError === null ? "none" : "block";

  if (session.state === "connected" && welcome !== null) {
    const tickMs = (welcome.tick * 1000).toFixed(1);
    statusLine.textContent =
      `connected as ${welcome.role}, ${welcome.joint_count} joint(s), tick ${tickMs} ms`;
  } else {
    statusLine.textContent = session.state;
  }

  for (const control of [flexorSlider, extensorSlider, relaxButton, pauseButton,
    resetButton, presetSelect, scenarioSelect, playButton]) {
    control.disabled = !controller;
  }
  if (!controller && session.state === "connected") {
    statusLine.textContent += " (read-only: another client holds the controls)";
  }

  if (welcome !== null && populatedFor !== welcome) {
    populatedFor = welcome;
    presetSelect.replaceChildren(
      ...welcome.presets.map((name) => new Option(name, name)),
    );
    scenarioSelect.replaceChildren(
      ...welcome.scenarios.map((name) => new Option(name, name)),
    );
  }

  // joint count follows the telemetry lanes (a preset change mid-session
  // alters it without a new welcome)
  const jointCount = session.ring?.jointCount ?? welcome?.joint_count ?? 0;
  if (jointCount !== jointOptionsFor && jointCount > 0) {
    jointOptionsFor = jointCount;
    jointSelect.replaceChildren(
      ...Array.from({ length: jointCount },
        (_, j) => new Option(`joint ${j}`, String(j))),
    );
  }
}

connectButton.addEventListener("click", () => {
  session.connect(addressInput.value);
});

function sliderMoved(): void {
  session.input.setFlexor(Number(flexorSlider.value));
  session.input.setExtensor(Number(extensorSlider.value));
}
flexorSlider.addEventListener("input", sliderMoved);
extensorSlider.addEventListener("input", sliderMoved);

relaxButton.addEventListener("click", () => session.input.relax());

window.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLInputElement && event.target.type === "text") {
    return;
  }
  if (session.input.handleKey(event.key)) {
    event.preventDefault();
  }
});

pauseButton.addEventListener("click", () => {
  paused = !paused;
  session.command({ kind: "pause", paused });
  pauseButton.textContent = paused ? "resume" : "pause";
});
resetButton.addEventListener("click", () => {
  session.command({ kind: "reset" });
});
presetSelect.addEventListener("change", () => {
  session.command({ kind: "load_preset", name: presetSelect.value });
});
playButton.addEventListener("click", () => {
  session.command({ kind: "start_scenario", name: scenarioSelect.value });
});

function frame(): void {
  session.frame();

  // slider knobs track the input state so keyboard and relax stay in sync
  flexorSlider.value = session.input.flexorLevel.toFixed(3);
  extensorSlider.value = session.input.extensorLevel.toFixed(3);
  flexorReadout.textContent = session.input.flexorLevel.toFixed(2);
  extensorReadout.textContent = session.input.extensorLevel.toFixed(2);

  const joint = Number(jointSelect.value) || 0;
  charts.render(session.ring, joint, session.latency.history());
  hand.render(session.ring?.latest() ?? null);

  const worst = session.latency.worstLatency();
  latencyLine.textContent = session.latency.history().length > 0
    ? `worst command latency: ${worst} tick(s)`
    : "";

  requestAnimationFrame(frame);
}

addressInput.value = `ws://${window.location.hostname || "127.0.0.1"}:8765`;
syncControls();
requestAnimationFrame(frame);
