"""Forward computation of vanilla RNN and LSTM cells with full tracing.

Every intermediate (gate activations, candidate, cell state, activation) is
recorded per layer and timestep so the step machine and the UI can replay the
computation at micro granularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mathkernel import (
    DimensionMismatch,
    hadamard,
    init_params,
    mat_vec_mul,
    sigmoid,
    tanh_vec,
)

VANILLA = "vanilla"
LSTM = "lstm"

MAX_LAYERS = 7

# canonical parameter order per cell kind; optimizer state and gradients
# mirror this ordering
VANILLA_NAMES = ("w_ax", "w_aa", "b_a")
LSTM_NAMES = (
    "w_ix", "w_ia", "b_i",
    "w_fx", "w_fa", "b_f",
    "w_ox", "w_oa", "b_o",
    "w_cx", "w_ca", "b_c",
)


@dataclass
class CellParams:
    kind: str
    weights: dict

    @property
    def hidden(self):
        first = next(iter(self.weights.values()))
        return first.shape[0]

    def names(self):
        return VANILLA_NAMES if self.kind == VANILLA else LSTM_NAMES

    def copy(self):
        return CellParams(self.kind, {k: v.copy() for k, v in self.weights.items()})


@dataclass
class ParameterSet:
    layers: list
    head_w: np.ndarray
    head_b: np.ndarray

    def named_arrays(self):
        for i, cell in enumerate(self.layers):
            for name in cell.names():
                yield f"layer{i}.{name}", cell.weights[name]
        yield "head.w", self.head_w
        yield "head.b", self.head_b

    def arrays(self):
        return [a for _, a in self.named_arrays()]

    def copy(self):
        return ParameterSet(
            [c.copy() for c in self.layers], self.head_w.copy(), self.head_b.copy()
        )

    def to_bytes(self):
        return b"".join(a.tobytes() for a in self.arrays())


def zeros_like_params(params):
    """Same tree shape as params with all entries zero (gradients, moments)."""
    layers = [
        CellParams(c.kind, {k: np.zeros_like(v) for k, v in c.weights.items()})
        for c in params.layers
    ]
    return ParameterSet(layers, np.zeros_like(params.head_w), np.zeros_like(params.head_b))


def init_cell(kind, input_dim, hidden, rng, forget_bias=1.0):
    w = {}
    if kind == VANILLA:
        w["w_ax"] = init_params(hidden, input_dim, "glorot-uniform", rng)
        w["w_aa"] = init_params(hidden, hidden, "glorot-uniform", rng)
        w["b_a"] = np.zeros(hidden)
    elif kind == LSTM:
        for gate in ("i", "f", "o", "c"):
            w[f"w_{gate}x"] = init_params(hidden, input_dim, "glorot-uniform", rng)
            w[f"w_{gate}a"] = init_params(hidden, hidden, "glorot-uniform", rng)
            w[f"b_{gate}"] = np.zeros(hidden)
        # positive forget bias keeps early cell-state memory alive
        w["b_f"] = np.full(hidden, float(forget_bias))
    else:
        raise ValueError(f"unknown cell kind {kind!r}")
    return CellParams(kind, w)


def init_parameter_set(kind, layer_count, input_dim, hidden, output_dim, rng,
                       forget_bias=1.0):
    if not 1 <= layer_count <= MAX_LAYERS:
        raise ValueError(f"layer_count must be in 1..{MAX_LAYERS}, got {layer_count}")
    layers = []
    dim = input_dim
    for _ in range(layer_count):
        layers.append(init_cell(kind, dim, hidden, rng, forget_bias))
        dim = hidden
    head_w = init_params(output_dim, hidden, "glorot-uniform", rng)
    head_b = np.zeros(output_dim)
    return ParameterSet(layers, head_w, head_b)


@dataclass
class CellStep:
    """Trace record for one layer at one timestep."""

    x: np.ndarray
    a_prev: np.ndarray
    c_prev: np.ndarray | None
    i: np.ndarray | None
    f: np.ndarray | None
    o: np.ndarray | None
    g: np.ndarray | None
    c: np.ndarray | None
    a: np.ndarray = None


@dataclass
class ForwardTrace:
    steps: list  # [layer][timestep] -> CellStep
    prediction: np.ndarray
    final_states: list  # per layer (a_T, c_T or None)

    @property
    def n_layers(self):
        return len(self.steps)

    @property
    def n_steps(self):
        return len(self.steps[0])


def vanilla_step(p, x_t, a_prev):
    z = mat_vec_mul(p.weights["w_ax"], x_t) + mat_vec_mul(p.weights["w_aa"], a_prev) \
        + p.weights["b_a"]
    a_t = tanh_vec(z)
    return CellStep(x=x_t, a_prev=a_prev, c_prev=None, i=None, f=None, o=None,
                    g=None, c=None, a=a_t)


def lstm_step(p, x_t, a_prev, c_prev):
    w = p.weights
    i_t = sigmoid(mat_vec_mul(w["w_ix"], x_t) + mat_vec_mul(w["w_ia"], a_prev) + w["b_i"])
    f_t = sigmoid(mat_vec_mul(w["w_fx"], x_t) + mat_vec_mul(w["w_fa"], a_prev) + w["b_f"])
    o_t = sigmoid(mat_vec_mul(w["w_ox"], x_t) + mat_vec_mul(w["w_oa"], a_prev) + w["b_o"])
    g_t = tanh_vec(mat_vec_mul(w["w_cx"], x_t) + mat_vec_mul(w["w_ca"], a_prev) + w["b_c"])
    c_t = hadamard(f_t, c_prev) + hadamard(i_t, g_t)
    a_t = hadamard(o_t, tanh_vec(c_t))
    return CellStep(x=x_t, a_prev=a_prev, c_prev=c_prev, i=i_t, f=f_t, o=o_t,
                    g=g_t, c=c_t, a=a_t)


def output_head(params, a):
    if a.shape[0] != params.head_w.shape[1]:
        raise DimensionMismatch(
            f"head expects activation of length {params.head_w.shape[1]}, got {a.shape[0]}"
        )
    return mat_vec_mul(params.head_w, a) + params.head_b


def _run_steps(params, inputs, a_states, c_states, steps):
    """Advance all layers over the given inputs, mutating states and the trace."""
    for x in inputs:
        x = np.asarray(x, dtype=np.float64)
        for l, cell in enumerate(params.layers):
            if cell.kind == VANILLA:
                step = vanilla_step(cell, x, a_states[l])
            else:
                step = lstm_step(cell, x, a_states[l], c_states[l])
                c_states[l] = step.c
            a_states[l] = step.a
            steps[l].append(step)
            x = step.a


def forward_sequence(params, inputs):
    """Run all layers over the whole input sequence; layer 0 consumes the raw
    inputs and each deeper layer consumes the activations below it."""
    if len(inputs) == 0:
        raise ValueError("forward_sequence needs a non-empty input sequence")
    n_layers = len(params.layers)
    a_states = [np.zeros(c.hidden) for c in params.layers]
    c_states = [np.zeros(c.hidden) for c in params.layers]
    steps = [[] for _ in range(n_layers)]
    _run_steps(params, inputs, a_states, c_states, steps)
    prediction = output_head(params, a_states[-1])
    finals = [
        (a_states[l], c_states[l] if params.layers[l].kind == LSTM else None)
        for l in range(n_layers)
    ]
    return ForwardTrace(steps=steps, prediction=prediction, final_states=finals)


def predictions_at_tail(trace, params, k):
    """Head outputs at the last k timesteps (teacher-forced horizon)."""
    t_total = trace.n_steps
    if k > t_total:
        raise ValueError(f"horizon {k} exceeds trace length {t_total}")
    return [output_head(params, trace.steps[-1][t].a) for t in range(t_total - k, t_total)]


def free_run(params, seed_window, k, alphabet_size=None):
    """Forward over the seed window, then feed each prediction back as the next
    input k-1 times. With alphabet_size set (text mode) the feedback is the
    one-hot of the argmax character; otherwise the raw prediction vector."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(seed_window) == 0:
        raise ValueError("free_run needs a non-empty seed window")
    n_layers = len(params.layers)
    a_states = [np.zeros(c.hidden) for c in params.layers]
    c_states = [np.zeros(c.hidden) for c in params.layers]
    steps = [[] for _ in range(n_layers)]
    _run_steps(params, seed_window, a_states, c_states, steps)
    predictions = [output_head(params, a_states[-1])]
    for _ in range(k - 1):
        prev = predictions[-1]
        if alphabet_size is not None:
            nxt = np.zeros(alphabet_size)
            nxt[int(np.argmax(prev))] = 1.0
        else:
            nxt = prev
        _run_steps(params, [nxt], a_states, c_states, steps)
        predictions.append(output_head(params, a_states[-1]))
    finals = [
        (a_states[l], c_states[l] if params.layers[l].kind == LSTM else None)
        for l in range(n_layers)
    ]
    trace = ForwardTrace(steps=steps, prediction=predictions[-1], final_states=finals)
    return predictions, trace
