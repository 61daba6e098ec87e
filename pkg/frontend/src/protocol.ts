// Wire protocol types mirroring the engine's JSON envelopes:
// {"type": ..., "seq": n, "body": {...}}, one JSON document per message.

export type EnvelopeType = "command" | "snapshot" | "error" | "hello";

export interface Envelope {
  type: EnvelopeType;
  seq: number;
  body: Record<string, unknown>;
}

export type Phase = "prediction" | "validation" | "training";

export interface ViewState {
  mode: "overview" | "cell";
  layer: number | null;
}

export interface StepEventInfo {
  index: number;
  phase: Phase;
  detail: string;
  layer?: number | null;
  t?: number | null;
  payload?: unknown;
}

export interface CellValues {
  layer: number;
  t: number;
  input_gate: number[] | null;
  forget_gate: number[] | null;
  output_gate: number[] | null;
  candidate: number[] | null;
  cell_state: number[] | null;
  activation: number[] | null;
}

export interface ValidationPlotData {
  xs?: number[];
  input: number[] | string[];
  target: number[] | string;
  prediction: number[] | string;
  error: number[];
}

export interface SessionConfig {
  cell_kind: "vanilla" | "lstm";
  layer_count: number;
  hidden: number;
  task: string;
  window: number;
  horizon: number;
  noise_amp: number;
  learning_rate: number;
  batch_size: number;
  batches_per_epoch: number;
  seed: number;
  [key: string]: unknown;
}

export interface Snapshot {
  session_id: string;
  epoch: number;
  phase: Phase;
  view: ViewState;
  config: SessionConfig;
  loss_history: Array<[number, number, number]>;
  validation: ValidationPlotData | null;
  current_step: StepEventInfo | null;
  cell: CellValues | null;
  grad_norms: number[][] | null;
  diverged: boolean;
}

export interface CommandBody {
  cmd: string;
  [key: string]: unknown;
}

export function commandEnvelope(seq: number, body: CommandBody): Envelope {
  return { type: "command", seq, body };
}

export function parseSnapshot(raw: unknown): Snapshot {
  const env = raw as Envelope;
  if (env.type !== "snapshot") {
    throw new Error(`expected a snapshot envelope, got ${env.type}`);
  }
  return env.body as unknown as Snapshot;
}
