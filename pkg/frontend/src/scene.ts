// Pure scene builders: a snapshot in, a renderable description out. Rendering
// any snapshot alone yields a complete scene (no hidden incremental state),
// which is what makes mid-training snapshots loadable from a file.

import { buildPlotModel, PlotModel } from "./plot.js";
import type { Phase, Snapshot } from "./protocol.js";

// complementary accent hues: blue for the network overview, orange for the
// focused cell view
export const OVERVIEW_ACCENT = "#2471c8";
export const CELL_ACCENT = "#e08a1e";

export type FlowDirection = "forward" | "backward" | "idle";

export interface LayerGlyph {
  index: number;
  cellKind: "vanilla" | "lstm";
  hidden: number;
  hasRecurrenceLoop: boolean;
  removable: boolean;
}

export interface OverviewScene {
  kind: "overview";
  accent: string;
  task: string;
  layers: LayerGlyph[];
  canAddLayer: boolean;
  flowDirection: FlowDirection;
  phase: Phase;
  epoch: number;
  plot: PlotModel | null;
  lossHistory: Array<[number, number, number]>;
  divergedWarning: boolean;
  controls: ControlsState;
}

export interface ControlsState {
  learningRate: number;
  batchSize: number;
  noiseAmp: number;
  taskOptions: string[];
  phaseButtons: Phase[];
}

export type CellComponent =
  | "input"
  | "gates"
  | "cell_state"
  | "activation"
  | "none";

export interface GateReadout {
  name: "input_gate" | "forget_gate" | "output_gate";
  values: number[] | null;
}

export interface CellScene {
  kind: "cell";
  accent: string;
  layer: number;
  timestep: number | null;
  highlight: CellComponent;
  stepLabel: string | null;
  gates: GateReadout[];
  candidate: number[] | null;
  cellState: number[] | null; // the memory-card icon's value
  activation: number[] | null;
  isLstm: boolean;
  plot: PlotModel | null;
  divergedWarning: boolean;
}

export const TASK_OPTIONS = ["sine", "sawtooth", "square", "composite", "abab", "lorem"];

const DETAIL_TO_COMPONENT: Record<string, CellComponent> = {
  layer_input: "input",
  gate_activations: "gates",
  cell_state_update: "cell_state",
  output_activation: "activation",
  backward_step: "activation",
};

export function flowDirectionFor(phase: Phase): FlowDirection {
  // forward dashes while predicting/validating; reversed while training
  return phase === "training" ? "backward" : "forward";
}

function controlsFrom(snapshot: Snapshot): ControlsState {
  return {
    learningRate: snapshot.config.learning_rate,
    batchSize: snapshot.config.batch_size,
    noiseAmp: snapshot.config.noise_amp,
    taskOptions: TASK_OPTIONS,
    phaseButtons: ["prediction", "validation", "training"],
  };
}

export function buildOverviewScene(snapshot: Snapshot): OverviewScene {
  const layerCount = snapshot.config.layer_count;
  const layers: LayerGlyph[] = [];
  for (let i = 0; i < layerCount; i++) {
    layers.push({
      index: i,
      cellKind: snapshot.config.cell_kind,
      hidden: snapshot.config.hidden,
      hasRecurrenceLoop: true,
      removable: layerCount > 1,
    });
  }
  return {
    kind: "overview",
    accent: OVERVIEW_ACCENT,
    task: snapshot.config.task,
    layers,
    canAddLayer: layerCount < 7,
    flowDirection: flowDirectionFor(snapshot.phase),
    phase: snapshot.phase,
    epoch: snapshot.epoch,
    plot: buildPlotModel(snapshot),
    lossHistory: snapshot.loss_history,
    divergedWarning: snapshot.diverged,
    controls: controlsFrom(snapshot),
  };
}

export function buildCellScene(snapshot: Snapshot): CellScene {
  const step = snapshot.current_step;
  const cell = snapshot.cell;
  const layer = snapshot.view.layer ?? 0;
  const highlight: CellComponent = step ? DETAIL_TO_COMPONENT[step.detail] ?? "none" : "none";
  return {
    kind: "cell",
    accent: CELL_ACCENT,
    layer,
    timestep: cell ? cell.t : null,
    highlight,
    stepLabel: step ? step.detail : null,
    gates: [
      { name: "input_gate", values: cell ? cell.input_gate : null },
      { name: "forget_gate", values: cell ? cell.forget_gate : null },
      { name: "output_gate", values: cell ? cell.output_gate : null },
    ],
    candidate: cell ? cell.candidate : null,
    cellState: cell ? cell.cell_state : null,
    activation: cell ? cell.activation : null,
    isLstm: snapshot.config.cell_kind === "lstm",
    plot: buildPlotModel(snapshot),
    divergedWarning: snapshot.diverged,
  };
}

export function buildScene(snapshot: Snapshot): OverviewScene | CellScene {
  return snapshot.view.mode === "cell"
    ? buildCellScene(snapshot)
    : buildOverviewScene(snapshot);
}

export function accentFor(snapshot: Snapshot): string {
  return snapshot.view.mode === "cell" ? CELL_ACCENT : OVERVIEW_ACCENT;
}
