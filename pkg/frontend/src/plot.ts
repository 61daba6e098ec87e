// Builds the data-plot model: input series, target vs prediction over the
// horizon, the sliding window bounds, and per-point error segments.

import type { Snapshot } from "./protocol.js";

export interface SeriesPoint {
  x: number;
  y: number;
}

export interface ErrorSegment {
  x: number;
  from: number; // prediction
  to: number; // target
}

export interface PlotModel {
  input: SeriesPoint[];
  target: SeriesPoint[];
  prediction: SeriesPoint[];
  windowStart: number;
  windowEnd: number;
  errorSegments: ErrorSegment[];
  textual: boolean;
}

export function buildPlotModel(snapshot: Snapshot): PlotModel | null {
  const v = snapshot.validation;
  if (!v) return null;
  if (typeof v.target === "string" || typeof v.input[0] === "string") {
    // text task: no numeric plot, the cell view shows characters instead
    return {
      input: [],
      target: [],
      prediction: [],
      windowStart: 0,
      windowEnd: 0,
      errorSegments: [],
      textual: true,
    };
  }
  const input = v.input as number[];
  const target = v.target as number[];
  const prediction = v.prediction as number[];
  const xs = v.xs ?? input.concat(target).map((_, i) => i);
  const inputPts = input.map((y, i) => ({ x: xs[i], y }));
  const targetPts = target.map((y, i) => ({ x: xs[input.length + i], y }));
  const predictionPts = prediction.map((y, i) => ({ x: xs[input.length + i], y }));
  // error lines exist only where prediction and target overlap
  const n = Math.min(targetPts.length, predictionPts.length);
  const errorSegments: ErrorSegment[] = [];
  for (let i = 0; i < n; i++) {
    errorSegments.push({ x: targetPts[i].x, from: predictionPts[i].y, to: targetPts[i].y });
  }
  return {
    input: inputPts,
    target: targetPts,
    prediction: predictionPts,
    windowStart: xs[0],
    windowEnd: xs[input.length - 1],
    errorSegments,
    textual: false,
  };
}
