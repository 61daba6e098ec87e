// DOM rendering of scenes. Deliberately thin: all decisions about what to show
// live in scene.ts; this file only materializes a scene into SVG/HTML.

import { UserAction } from "./commands.js";
import { PlotModel } from "./plot.js";
import { CellScene, OverviewScene } from "./scene.js";

export type ActionSink = (action: UserAction) => void;

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function plotSvg(plot: PlotModel, accent: string): SVGElement {
  const width = 320;
  const height = 160;
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  if (plot.textual || plot.input.length === 0) return svg;
  const all = plot.input.concat(plot.target, plot.prediction);
  const xMin = Math.min(...all.map((p) => p.x));
  const xMax = Math.max(...all.map((p) => p.x));
  const yMin = Math.min(-1.4, ...all.map((p) => p.y));
  const yMax = Math.max(1.4, ...all.map((p) => p.y));
  const sx = (x: number) => ((x - xMin) / (xMax - xMin)) * (width - 20) + 10;
  const sy = (y: number) => height - (((y - yMin) / (yMax - yMin)) * (height - 20) + 10);

  // sliding gray box over the input window
  svg.appendChild(
    svgEl("rect", {
      x: sx(plot.windowStart),
      y: 0,
      width: sx(plot.windowEnd) - sx(plot.windowStart),
      height,
      fill: "#888",
      opacity: 0.15,
      class: "window-box",
    })
  );
  const path = (pts: { x: number; y: number }[]) =>
    pts.map((p, i) => `${i === 0 ? "M" : "L"}${sx(p.x)},${sy(p.y)}`).join(" ");
  svg.appendChild(
    svgEl("path", { d: path(plot.input), stroke: "#555", fill: "none", "stroke-width": 1.5 })
  );
  svg.appendChild(
    svgEl("path", { d: path(plot.target), stroke: "#999", fill: "none", "stroke-dasharray": "3 3" })
  );
  svg.appendChild(
    svgEl("path", { d: path(plot.prediction), stroke: accent, fill: "none", "stroke-width": 2 })
  );
  for (const seg of plot.errorSegments) {
    svg.appendChild(
      svgEl("line", {
        x1: sx(seg.x),
        x2: sx(seg.x),
        y1: sy(seg.from),
        y2: sy(seg.to),
        stroke: "#d33",
        "stroke-width": 1,
        class: "error-line",
      })
    );
  }
  return svg;
}

function lossSparkline(history: Array<[number, number, number]>): SVGElement {
  const width = 320;
  const height = 60;
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  if (history.length < 2) return svg;
  const losses = history.map((h) => h[2]);
  const max = Math.max(...losses);
  const pts = losses.map(
    (l, i) =>
      `${(i / (losses.length - 1)) * (width - 10) + 5},${height - 5 - (l / max) * (height - 10)}`
  );
  svg.appendChild(
    svgEl("polyline", { points: pts.join(" "), stroke: "#d33", fill: "none" })
  );
  return svg;
}

function controlsBar(scene: OverviewScene | CellScene, sink: ActionSink): HTMLElement {
  const bar = el("div", "controls");
  const btn = (label: string, action: UserAction) => {
    const b = el("button", "ctrl", label);
    b.onclick = () => sink(action);
    bar.appendChild(b);
  };
  btn("⏮ rewind", { action: "rewind" });
  btn("▶ play", { action: "play" });
  btn("⏸ pause", { action: "pause" });
  btn("⏭ step", { action: "forward" });

  const speed = el("input") as HTMLInputElement;
  speed.type = "range";
  speed.min = "0.5";
  speed.max = "20";
  speed.step = "0.5";
  speed.value = "2";
  speed.title = "animation speed (steps per second)";
  speed.oninput = () => sink({ action: "speed", rate: Number(speed.value) });
  bar.appendChild(speed);

  for (const phase of ["prediction", "validation", "training"] as const) {
    btn(phase, { action: "jump", phase });
  }
  return bar;
}

function parameterPanel(scene: OverviewScene, sink: ActionSink): HTMLElement {
  const panel = el("div", "parameters");
  const slider = (
    label: string,
    name: "learning_rate" | "batch_size" | "noise_amp",
    min: number,
    max: number,
    step: number,
    value: number
  ) => {
    const wrap = el("label", "param", label);
    const input = el("input") as HTMLInputElement;
    input.type = "range";
    input.min = String(min);
    input.max = String(max);
    input.step = String(step);
    input.value = String(value);
    input.onchange = () => sink({ action: "slider", name, value: Number(input.value) });
    wrap.appendChild(input);
    panel.appendChild(wrap);
  };
  slider("learning rate", "learning_rate", 0.0001, 0.1, 0.0001, scene.controls.learningRate);
  slider("batch size", "batch_size", 1, 64, 1, scene.controls.batchSize);
  slider("noise", "noise_amp", 0, 1, 0.05, scene.controls.noiseAmp);

  const select = el("select") as HTMLSelectElement;
  for (const task of scene.controls.taskOptions) {
    const opt = el("option", undefined, task) as HTMLOptionElement;
    opt.value = task;
    opt.selected = task === scene.task;
    select.appendChild(opt);
  }
  select.onchange = () => sink({ action: "select_task", task: select.value });
  panel.appendChild(select);
  return panel;
}

export function renderOverview(
  root: HTMLElement,
  scene: OverviewScene,
  sink: ActionSink
): void {
  root.innerHTML = "";
  root.style.setProperty("--accent", scene.accent);
  if (scene.divergedWarning) {
    const warn = el("div", "diverged-warning", "training diverged — rewind to reset");
    const reset = el("button", "ctrl", "reset");
    reset.onclick = () => sink({ action: "rewind" });
    warn.appendChild(reset);
    root.appendChild(warn);
  }
  const header = el("div", "header", `epoch ${scene.epoch} · ${scene.phase}`);
  root.appendChild(header);

  const row = el("div", "network-row");
  row.appendChild(el("div", "input-selector", scene.task));
  const chain = el("div", `layer-chain flow-${scene.flowDirection}`);
  scene.layers.forEach((layer, i) => {
    const glyph = el("div", "layer-glyph");
    glyph.appendChild(el("div", "recurrence-loop"));
    glyph.appendChild(el("div", "layer-label", `${layer.cellKind} ×${layer.hidden}`));
    glyph.onclick = () => sink({ action: "open_cell", layer: i });
    glyph.onmouseenter = () => glyph.classList.add("hover");
    glyph.onmouseleave = () => glyph.classList.remove("hover");
    if (layer.removable) {
      const rm = el("button", "remove-layer", "×");
      rm.onclick = (e) => {
        e.stopPropagation();
        sink({ action: "remove_layer", at: i });
      };
      glyph.appendChild(rm);
    }
    chain.appendChild(glyph);
    chain.appendChild(el("div", "connection"));
  });
  if (scene.canAddLayer) {
    const add = el("button", "add-layer", "+ layer");
    add.onclick = () => sink({ action: "add_layer", at: scene.layers.length });
    chain.appendChild(add);
  }
  row.appendChild(chain);

  const plotBox = el("div", "plot-box");
  if (scene.plot) plotBox.appendChild(plotSvg(scene.plot, scene.accent));
  plotBox.appendChild(lossSparkline(scene.lossHistory));
  row.appendChild(plotBox);
  root.appendChild(row);

  root.appendChild(controlsBar(scene, sink));
  root.appendChild(parameterPanel(scene, sink));
}

const EXPLANATIONS: Record<string, string> = {
  gates:
    "The three gates filter information flow: how much new input enters, how much memory is kept, and how much of the state is emitted.",
  cell_state: "The cell state is the cell's internal memory, updated additively each step.",
  input: "The layer receives its input for this timestep.",
  activation: "The activation leaving the cell, passed up the stack and on in time.",
};

export function renderCell(root: HTMLElement, scene: CellScene, sink: ActionSink): void {
  root.innerHTML = "";
  root.style.setProperty("--accent", scene.accent);
  if (scene.divergedWarning) {
    root.appendChild(el("div", "diverged-warning", "training diverged — rewind to reset"));
  }
  const backdrop = el("div", "cell-backdrop");
  backdrop.onclick = () => sink({ action: "close_cell" });
  root.appendChild(backdrop);

  const panel = el("div", "cell-panel");
  panel.onclick = (e) => e.stopPropagation();
  panel.appendChild(
    el(
      "div",
      "header",
      `layer ${scene.layer}` + (scene.timestep !== null ? ` · t=${scene.timestep}` : "")
    )
  );
  const anatomy = el("div", "cell-anatomy");
  const mean = (v: number[] | null) =>
    v && v.length ? (v.reduce((a, b) => a + b, 0) / v.length).toFixed(3) : "—";
  for (const gate of scene.gates) {
    const icon = el("div", "gate-icon", `${gate.name.replace("_", " ")}\n${mean(gate.values)}`);
    if (scene.highlight === "gates") icon.classList.add("highlight");
    icon.onclick = () => showExplanation(panel, "gates");
    anatomy.appendChild(icon);
  }
  const memory = el("div", "memory-card", `cell state\n${mean(scene.cellState)}`);
  if (scene.highlight === "cell_state") memory.classList.add("highlight");
  memory.onclick = () => showExplanation(panel, "cell_state");
  anatomy.appendChild(memory);
  const act = el("div", "activation-icon", `activation\n${mean(scene.activation)}`);
  if (scene.highlight === "activation") act.classList.add("highlight");
  act.onclick = () => showExplanation(panel, "activation");
  anatomy.appendChild(act);
  panel.appendChild(anatomy);

  if (scene.stepLabel) panel.appendChild(el("div", "step-label", scene.stepLabel));
  const plotBox = el("div", "plot-box");
  if (scene.plot) plotBox.appendChild(plotSvg(scene.plot, scene.accent));
  panel.appendChild(plotBox);
  panel.appendChild(controlsBar(scene, sink));
  root.appendChild(panel);
}

function showExplanation(panel: HTMLElement, key: string): void {
  let box = panel.querySelector<HTMLElement>(".explanation");
  if (!box) {
    box = el("div", "explanation");
    panel.appendChild(box);
  }
  box.textContent = EXPLANATIONS[key] ?? "";
}
