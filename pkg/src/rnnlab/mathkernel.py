"""Dense linear algebra, elementwise nonlinearities, and seeded randomness.

Everything above this module is deterministic given a seed: the RNG is a
hand-rolled xoshiro256** so that the same (algorithm, seed) pair produces a
bit-identical draw sequence on every platform and in every language that
implements the same generator.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


class DimensionMismatch(ValueError):
    """Raised when operand shapes are incompatible; message carries both shapes."""


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def derive_seed(seed, stream_index):
    """Deterministically derive an independent seed (e.g. per init generation)."""
    state = seed & _MASK64
    out = 0
    for _ in range(stream_index + 1):
        state, out = _splitmix64(state)
    return out


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK64


class RngStream:
    """xoshiro256** stream; one stream is owned by exactly one session."""

    ALGORITHM = "xoshiro256**"

    def __init__(self, seed):
        self.seed = int(seed)
        state = self.seed & _MASK64
        s = []
        for _ in range(4):
            state, word = _splitmix64(state)
            s.append(word)
        self._s = s

    def clone(self):
        other = RngStream.__new__(RngStream)
        other.seed = self.seed
        other._s = list(self._s)
        return other

    def state_bytes(self):
        return b"".join(w.to_bytes(8, "little") for w in self._s)

    def next_u64(self):
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self, low=0.0, high=1.0):
        u = (self.next_u64() >> 11) * 2.0**-53  # [0, 1)
        return low + (high - low) * u

    def uniforms(self, n, low=0.0, high=1.0):
        return np.array([self.uniform(low, high) for _ in range(n)])

    def randint(self, n):
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("randint bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


def as_vector(data):
    v = np.asarray(data, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected 1-d vector, got shape {v.shape}")
    return v


def as_matrix(data):
    m = np.asarray(data, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected 2-d matrix, got shape {m.shape}")
    return m


def mat_vec_mul(m, v):
    m = as_matrix(m)
    v = as_vector(v)
    if m.shape[1] != v.shape[0]:
        raise DimensionMismatch(
            f"matrix {m.shape[0]}x{m.shape[1]} incompatible with vector of length {v.shape[0]}"
        )
    return m @ v


def hadamard(a, b):
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise DimensionMismatch(
            f"hadamard operands differ: length {a.shape[0]} vs {b.shape[0]}"
        )
    return a * b


def sigmoid(v):
    v = np.asarray(v, dtype=np.float64)
    # split by sign so exp never overflows
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)
    return out


def tanh_vec(v):
    return np.tanh(np.asarray(v, dtype=np.float64))


def init_params(rows, cols, scheme, rng):
    """Initialize a rows x cols weight matrix; only glorot-uniform is known."""
    if rows <= 0 or cols <= 0:
        raise ValueError(f"dimensions must be positive, got {rows}x{cols}")
    if scheme != "glorot-uniform":
        raise ValueError(f"unknown init scheme {scheme!r}")
    bound = np.sqrt(6.0 / (rows + cols))
    return rng.uniforms(rows * cols, -bound, bound).reshape(rows, cols)
