"""Minimal dense-network machinery.

Flat float64 parameter vectors over a fixed layer layout, a tanh MLP with
exact reverse-mode gradients, an Adam optimizer, elementwise parameter
averaging, and a binary serialization format for checkpoints and the
federation boundary.

The parameter vector is the unit of federation: two vectors are aggregable
iff their layouts (the chain of layer dimensions) are identical.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

HEADS = ("linear", "sigmoid")


@dataclass(frozen=True)
class MlpSpec:
    """Layer dimensions plus output head of a dense tanh network."""

    dims: tuple[int, ...]
    head: str = "linear"

    def __post_init__(self):
        if len(self.dims) < 2 or any(d < 1 for d in self.dims):
            raise ValueError(f"dims must be >= 2 entries of >= 1, got {self.dims}")
        if self.head not in HEADS:
            raise ValueError(f"head must be one of {HEADS}, got {self.head!r}")

    @property
    def param_count(self) -> int:
        return sum((i + 1) * o for i, o in zip(self.dims[:-1], self.dims[1:]))


@dataclass
class ParamVector:
    """Flat float64 parameters with their layer layout."""

    values: np.ndarray
    layout: tuple[int, ...]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.layout = tuple(int(d) for d in self.layout)
        expected = sum((i + 1) * o for i, o in zip(self.layout[:-1], self.layout[1:]))
        if self.values.shape != (expected,):
            raise ValueError(
                f"layout {self.layout} needs {expected} values, got {self.values.shape}"
            )

    def copy(self) -> "ParamVector":
        return ParamVector(self.values.copy(), self.layout)


def zeros_like(spec: MlpSpec) -> ParamVector:
    return ParamVector(np.zeros(spec.param_count), spec.dims)


def init_params(spec: MlpSpec, rng: np.random.Generator) -> ParamVector:
    """Fan-in scaled uniform weights, zero biases."""
    chunks = []
    for fan_in, fan_out in zip(spec.dims[:-1], spec.dims[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        chunks.append(rng.uniform(-bound, bound, size=fan_in * fan_out))
        chunks.append(np.zeros(fan_out))
    return ParamVector(np.concatenate(chunks), spec.dims)


def _layers(spec: MlpSpec, params: ParamVector):
    """Yield (W, b) views into the flat vector, in layer order."""
    if params.layout != spec.dims:
        raise ValueError(f"param layout {params.layout} does not match spec {spec.dims}")
    flat = params.values
    offset = 0
    for fan_in, fan_out in zip(spec.dims[:-1], spec.dims[1:]):
        w = flat[offset : offset + fan_in * fan_out].reshape(fan_in, fan_out)
        offset += fan_in * fan_out
        b = flat[offset : offset + fan_out]
        offset += fan_out
        yield w, b


def forward(spec: MlpSpec, params: ParamVector, x: np.ndarray) -> np.ndarray:
    """Pure forward pass; accepts (in,) or (batch, in)."""
    y, _ = forward_cached(spec, params, x)
    return y


def forward_cached(spec: MlpSpec, params: ParamVector, x: np.ndarray):
    """Forward pass that keeps the per-layer activations needed by backward."""
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    h = x.reshape(1, -1) if squeeze else x
    if h.shape[1] != spec.dims[0]:
        raise ValueError(f"input dim {h.shape[1]} does not match spec input {spec.dims[0]}")
    layers = list(_layers(spec, params))
    acts = [h]
    for i, (w, b) in enumerate(layers):
        z = h @ w + b
        if i < len(layers) - 1:
            h = np.tanh(z)
        elif spec.head == "sigmoid":
            h = 1.0 / (1.0 + np.exp(-z))
        else:
            h = z
        acts.append(h)
    out = acts[-1][0] if squeeze else acts[-1]
    return out, (acts, squeeze)


def backward(spec: MlpSpec, params: ParamVector, cache, dy: np.ndarray):
    """Exact gradient of the forward pass.

    Returns ``(dparams, dx)`` where ``dparams`` is a ParamVector of the same
    layout (summed over the batch) and ``dx`` matches the input shape.
    """
    acts, squeeze = cache
    dy = np.asarray(dy, dtype=np.float64)
    d = dy.reshape(1, -1) if squeeze else dy
    layers = list(_layers(spec, params))
    if d.shape != acts[-1].shape:
        raise ValueError(f"dy shape {d.shape} does not match output {acts[-1].shape}")
    if spec.head == "sigmoid":
        out = acts[-1]
        d = d * out * (1.0 - out)
    grads = [None] * len(layers)
    for i in range(len(layers) - 1, -1, -1):
        w, _ = layers[i]
        grads[i] = (acts[i].T @ d, d.sum(axis=0))
        d = d @ w.T
        if i > 0:
            d = d * (1.0 - acts[i] ** 2)
    flat = np.concatenate([np.concatenate([gw.ravel(), gb]) for gw, gb in grads])
    dx = d[0] if squeeze else d
    return ParamVector(flat, spec.dims), dx


class Adam:
    """Adaptive-moment optimizer; one instance per parameter vector."""

    def __init__(self, layout, lr=3e-4, beta1=0.9, beta2=0.999, eps=1e-8):
        self.layout = tuple(layout)
        size = sum((i + 1) * o for i, o in zip(self.layout[:-1], self.layout[1:]))
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: ParamVector, grad: ParamVector) -> ParamVector:
        """Apply one update in place on ``params`` and return it."""
        if params.layout != self.layout or grad.layout != self.layout:
            raise ValueError("optimizer, params and grad layouts must all match")
        self.t += 1
        g = grad.values
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * g
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * g * g
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        params.values -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
        return params


def average_params(vectors: list[ParamVector]) -> ParamVector:
    """Elementwise arithmetic mean of identically laid-out vectors.

    Uses exactly rounded summation so the result is independent of input
    order, and returns the shared value unchanged when all inputs agree
    bitwise (the mean of identical vectors is that vector).
    """
    if not vectors:
        raise ValueError("average_params needs at least one vector")
    first = vectors[0]
    for v in vectors[1:]:
        if v.layout != first.layout:
            raise ValueError(f"layout mismatch: {v.layout} vs {first.layout}")
    if all(np.array_equal(v.values, first.values) for v in vectors[1:]):
        return first.copy()
    stacked = np.stack([v.values for v in vectors])
    k = len(vectors)
    out = np.empty(stacked.shape[1])
    for j in range(stacked.shape[1]):
        out[j] = math.fsum(stacked[:, j]) / k
    return ParamVector(out, first.layout)


def save_params(pv: ParamVector, path: str | Path) -> None:
    """Layout header (u32 count + u32 dims, little-endian) then f64 values."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", len(pv.layout)))
        fh.write(struct.pack(f"<{len(pv.layout)}I", *pv.layout))
        fh.write(pv.values.astype("<f8").tobytes())


def load_params(path: str | Path) -> ParamVector:
    raw = Path(path).read_bytes()
    (n_dims,) = struct.unpack_from("<I", raw, 0)
    dims = struct.unpack_from(f"<{n_dims}I", raw, 4)
    values = np.frombuffer(raw, dtype="<f8", offset=4 + 4 * n_dims).copy()
    return ParamVector(values, dims)


def save_param_set(params: dict[str, ParamVector], directory: str | Path, manifest: dict) -> None:
    """One file per network plus a manifest naming the algorithm and layouts."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entry = dict(manifest)
    entry["networks"] = {}
    for name in sorted(params):
        filename = f"{name}.params"
        save_params(params[name], directory / filename)
        entry["networks"][name] = {"file": filename, "layout": list(params[name].layout)}
    (directory / "manifest.json").write_text(json.dumps(entry, indent=2, sort_keys=True) + "\n")


def load_param_set(directory: str | Path) -> tuple[dict[str, ParamVector], dict]:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    params = {
        name: load_params(directory / meta["file"])
        for name, meta in manifest["networks"].items()
    }
    return params, manifest
