// Browser entry point: connects to the engine, re-renders on every snapshot,
// and shows a short onboarding tour on first load.

import { EngineClient, defaultUrl } from "./client.js";
import { dispatch, UserAction } from "./commands.js";
import { parseSnapshot } from "./protocol.js";
import { buildScene } from "./scene.js";
import { renderCell, renderOverview } from "./render.js";

const TOUR_STEPS = [
  "This is a recurrent network learning live. Press play to watch it train.",
  "Each rounded block is a layer; the loop arrow marks its connection back to itself in time. Click a layer to open it.",
  "The plot shows the input window (gray box), the true continuation (dashed), and the network's prediction (accent color). Red lines are the errors being minimized.",
  "Use the sliders to steer the run mid-training: learning rate, batch size, and input noise all take effect at the next epoch.",
];

function runTour(root: HTMLElement): void {
  let step = 0;
  const overlay = document.createElement("div");
  overlay.className = "tour-overlay";
  const box = document.createElement("div");
  box.className = "tour-box";
  const text = document.createElement("p");
  const next = document.createElement("button");
  next.textContent = "next";
  const skip = document.createElement("button");
  skip.textContent = "skip tour";
  const close = () => overlay.remove();
  next.onclick = () => {
    step += 1;
    if (step >= TOUR_STEPS.length) close();
    else text.textContent = TOUR_STEPS[step];
  };
  skip.onclick = close;
  text.textContent = TOUR_STEPS[0];
  box.append(text, next, skip);
  overlay.appendChild(box);
  root.appendChild(overlay);
}

function start(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const status = document.getElementById("status");

  const client = new EngineClient(defaultUrl(), {
    onSnapshot: (env) => {
      const snapshot = parseSnapshot(env);
      const scene = buildScene(snapshot);
      if (scene.kind === "cell") renderCell(root, scene, sink);
      else renderOverview(root, scene, sink);
    },
    onError: (env) => {
      if (status) status.textContent = String(env.body.message ?? "error");
    },
    onConnectionChange: (connected) => {
      if (status) status.textContent = connected ? "" : "reconnecting…";
    },
  });
  const sink = (action: UserAction) => client.send(dispatch(action));
  client.connect();

  if (!localStorage.getItem("tour-done")) {
    runTour(document.body);
    localStorage.setItem("tour-done", "1");
  }
}

start();
