"""Loss functions and backpropagation through time over a recorded trace.

Gradients are hand-derived for the two cell kinds and verified against a
central finite-difference oracle (grad_check)."""

from __future__ import annotations

import numpy as np

from .cells import LSTM, VANILLA, forward_sequence, predictions_at_tail, zeros_like_params
from .mathkernel import DimensionMismatch

MSE = "mse"
CROSS_ENTROPY = "cross_entropy"


def softmax(logits):
    z = logits - np.max(logits)
    e = np.exp(z)
    return e / np.sum(e)


def loss(kind, prediction, target):
    prediction = np.asarray(prediction, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if prediction.shape != target.shape:
        raise DimensionMismatch(
            f"prediction length {prediction.shape} vs target length {target.shape}"
        )
    if kind == MSE:
        d = prediction - target
        return float(np.mean(d * d))
    if kind == CROSS_ENTROPY:
        p = softmax(prediction)
        idx = int(np.argmax(target))
        return float(-np.log(p[idx]))
    raise ValueError(f"unknown loss kind {kind!r}")


def sequence_loss(trace, params, loss_kind, targets):
    """Mean per-step loss over the last len(targets) timesteps of the trace."""
    preds = predictions_at_tail(trace, params, len(targets))
    return float(np.mean([loss(loss_kind, p, t) for p, t in zip(preds, targets)]))


def _loss_grad(kind, prediction, target, k):
    """d(mean-over-k-steps loss)/d(prediction) for a single injection step."""
    if kind == MSE:
        return 2.0 * (prediction - target) / (k * len(target))
    p = softmax(prediction)
    return (p - target) / k


def backward(trace, params, loss_kind, targets):
    """Exact reverse-mode gradients of the sequence loss w.r.t. every parameter.

    targets is a list of target vectors consumed by the last len(targets)
    timesteps (the teacher-forced horizon; length 1 for next-char prediction).
    Returns (GradientSet, per-timestep gradient norms ||dL/da^t|| with shape
    [layers, timesteps]) — the norms feed the vanishing-gradient diagnostic and
    the backward animation.
    """
    n_layers = trace.n_layers
    t_total = trace.n_steps
    if n_layers != len(params.layers):
        raise ValueError("trace and params disagree on layer count")
    k = len(targets)
    grads = zeros_like_params(params)

    # head injections at the last k timesteps
    da_inject = [[None] * t_total for _ in range(n_layers)]
    for j, target in enumerate(targets):
        t = t_total - k + j
        a_t = trace.steps[-1][t].a
        pred = params.head_w @ a_t + params.head_b
        dpred = _loss_grad(loss_kind, pred, np.asarray(target, dtype=np.float64), k)
        grads.head_w += np.outer(dpred, a_t)
        grads.head_b += dpred
        da_inject[-1][t] = params.head_w.T @ dpred

    norms = np.zeros((n_layers, t_total))
    # gradients flowing into (a_t, c_t) from timestep t+1, per layer
    da_rec = [np.zeros(c.hidden) for c in params.layers]
    dc_rec = [np.zeros(c.hidden) for c in params.layers]

    for t in range(t_total - 1, -1, -1):
        dx_down = None  # gradient w.r.t. the layer input, flows to the layer below
        for l in range(n_layers - 1, -1, -1):
            step = trace.steps[l][t]
            cell = params.layers[l]
            gl = grads.layers[l].weights
            da = da_rec[l].copy()
            if da_inject[l][t] is not None:
                da += da_inject[l][t]
            if dx_down is not None:
                da += dx_down
            norms[l, t] = float(np.linalg.norm(da))

            if cell.kind == VANILLA:
                dz = da * (1.0 - step.a * step.a)
                gl["w_ax"] += np.outer(dz, step.x)
                gl["w_aa"] += np.outer(dz, step.a_prev)
                gl["b_a"] += dz
                dx_down = cell.weights["w_ax"].T @ dz
                da_rec[l] = cell.weights["w_aa"].T @ dz
            else:
                tanh_c = np.tanh(step.c)
                do = da * tanh_c
                dc = da * step.o * (1.0 - tanh_c * tanh_c) + dc_rec[l]
                di = dc * step.g
                dg = dc * step.i
                df = dc * step.c_prev
                dc_rec[l] = dc * step.f
                di_pre = di * step.i * (1.0 - step.i)
                df_pre = df * step.f * (1.0 - step.f)
                do_pre = do * step.o * (1.0 - step.o)
                dg_pre = dg * (1.0 - step.g * step.g)
                w = cell.weights
                dx_down = np.zeros_like(step.x)
                da_next = np.zeros_like(da)
                for name, dpre in (("i", di_pre), ("f", df_pre), ("o", do_pre), ("c", dg_pre)):
                    gl[f"w_{name}x"] += np.outer(dpre, step.x)
                    gl[f"w_{name}a"] += np.outer(dpre, step.a_prev)
                    gl[f"b_{name}"] += dpre
                    dx_down = dx_down + w[f"w_{name}x"].T @ dpre
                    da_next = da_next + w[f"w_{name}a"].T @ dpre
                da_rec[l] = da_next
    return grads, norms


def clip_gradients(grads, max_norm):
    """Scale all entries so the global L2 norm is at most max_norm."""
    if max_norm <= 0:
        raise ValueError(f"max_norm must be positive, got {max_norm}")
    total = np.sqrt(sum(float(np.sum(a * a)) for a in grads.arrays()))
    if total > max_norm:
        scale = max_norm / total
        for a in grads.arrays():
            a *= scale
    return grads


def batch_loss(params, batch, loss_kind):
    """Mean sequence loss over a batch of (inputs, targets); forward-only, so it
    doubles as the objective for the finite-difference oracle."""
    total = 0.0
    for inputs, targets in batch:
        trace = forward_sequence(params, inputs)
        total += sequence_loss(trace, params, loss_kind, targets)
    return total / len(batch)


def batch_gradients(params, batch, loss_kind):
    """Mean analytic gradients over a batch, accumulated in a fixed order so
    sums are bit-reproducible. Returns (grads, mean loss, norms of last sample)."""
    grads = zeros_like_params(params)
    total = 0.0
    norms = None
    for inputs, targets in batch:
        trace = forward_sequence(params, inputs)
        total += sequence_loss(trace, params, loss_kind, targets)
        g, norms = backward(trace, params, loss_kind, targets)
        for acc, one in zip(grads.arrays(), g.arrays()):
            acc += one
    for acc in grads.arrays():
        acc /= len(batch)
    return grads, total / len(batch), norms


def grad_check(params, batch, loss_kind, epsilon=1e-5, max_coords=200, rng=None):
    """Max relative error between analytic and central-difference gradients.

    Checks every coordinate up to max_coords; beyond that, an evenly strided
    subsample (or rng-chosen if an rng is given) of at least max_coords."""
    analytic, _, _ = batch_gradients(params, batch, loss_kind)
    arrays = params.arrays()
    grad_arrays = analytic.arrays()
    coords = []
    for ai, a in enumerate(arrays):
        for flat in range(a.size):
            coords.append((ai, flat))
    if len(coords) > max_coords:
        if rng is not None:
            chosen = {coords[rng.randint(len(coords))] for _ in range(max_coords * 2)}
            coords = sorted(chosen)[:max_coords] if len(chosen) >= max_coords else sorted(chosen)
        else:
            stride = len(coords) // max_coords
            coords = coords[::stride]
    max_rel = 0.0
    for ai, flat in coords:
        a = arrays[ai]
        orig = a.flat[flat]
        a.flat[flat] = orig + epsilon
        up = batch_loss(params, batch, loss_kind)
        a.flat[flat] = orig - epsilon
        down = batch_loss(params, batch, loss_kind)
        a.flat[flat] = orig
        numeric = (up - down) / (2.0 * epsilon)
        exact = grad_arrays[ai].flat[flat]
        denom = max(abs(exact) + abs(numeric), 1e-8)
        rel = abs(exact - numeric) / denom
        if rel > max_rel:
            max_rel = rel
    return max_rel
