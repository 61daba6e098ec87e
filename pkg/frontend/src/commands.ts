// Maps user actions to protocol command bodies; every control corresponds to
// exactly one command.

import type { CommandBody, Phase } from "./protocol.js";

export type UserAction =
  | { action: "play" }
  | { action: "pause" }
  | { action: "forward" }
  | { action: "rewind" }
  | { action: "speed"; rate: number }
  | { action: "jump"; phase: Phase }
  | { action: "slider"; name: "learning_rate" | "batch_size" | "noise_amp"; value: number }
  | { action: "select_task"; task: string }
  | { action: "add_layer"; at: number }
  | { action: "remove_layer"; at: number }
  | { action: "set_cell_kind"; kind: "vanilla" | "lstm" }
  | { action: "open_cell"; layer: number }
  | { action: "close_cell" };

export function dispatch(action: UserAction): CommandBody {
  switch (action.action) {
    case "play":
      return { cmd: "play" };
    case "pause":
      return { cmd: "pause" };
    case "forward":
      return { cmd: "step" };
    case "rewind":
      return { cmd: "reset" };
    case "speed":
      return { cmd: "set_pace", rate: action.rate };
    case "jump":
      return { cmd: "jump_phase", phase: action.phase };
    case "slider":
      return { cmd: "set_param", name: action.name, value: action.value };
    case "select_task":
      return { cmd: "select_task", task: action.task };
    case "add_layer":
      return { cmd: "edit_arch", action: "add_layer", at: action.at };
    case "remove_layer":
      return { cmd: "edit_arch", action: "remove_layer", at: action.at };
    case "set_cell_kind":
      return { cmd: "edit_arch", action: "set_cell_kind", value: action.kind };
    case "open_cell":
      return { cmd: "set_view", mode: "cell", layer: action.layer };
    case "close_cell":
      return { cmd: "set_view", mode: "overview" };
  }
}
