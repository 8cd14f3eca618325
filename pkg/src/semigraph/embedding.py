"""Complex node embeddings and the diagonal-phase Hermitian score."""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

MODEL_MAGIC = b"SEMIGRAPH-MODEL\n"
MODEL_VERSION = 1
_BLOCKS = ("v_f", "v_d", "u_f", "u_d", "theta_f", "theta_d")


def _as_complex(x) -> np.ndarray:
    return np.asarray(x, dtype=np.complex128)


def _check_dims(*vecs):
    d = vecs[0].shape[-1]
    for v in vecs[1:]:
        if v.shape[-1] != d:
            raise ValueError(f"dimension mismatch: {d} vs {v.shape[-1]}")


def hermitian_score(vi, theta, vj) -> float:
    """``Re(conj(vi)^T W vj)`` with ``W = diag(exp(1j * theta))``.

    Accepts single vectors or equally shaped ``(..., d)`` stacks.
    """
    vi, vj = _as_complex(vi), _as_complex(vj)
    theta = np.asarray(theta, dtype=np.float64)
    _check_dims(vi, vj, theta)
    a, b = vi.real, vi.imag
    c, d = vj.real, vj.imag
    out = np.cos(theta) * (a * c + b * d) + np.sin(theta) * (b * c - a * d)
    return out.sum(axis=-1)


def context_score(vi, uc) -> float:
    """``Re(conj(vi)^T uc)``."""
    vi, uc = _as_complex(vi), _as_complex(uc)
    _check_dims(vi, uc)
    return (vi.real * uc.real + vi.imag * uc.imag).sum(axis=-1)


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    # exp of a non-positive argument never overflows
    e = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out if out.ndim else float(out)


def log_sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.minimum(x, 0.0) - np.log1p(np.exp(-np.abs(x)))
    return out if out.ndim else float(out)


def phase_matrix(theta) -> np.ndarray:
    """Dense diagonal ``W`` for a phase vector (diagnostics only)."""
    return np.diag(np.exp(1j * np.asarray(theta, dtype=np.float64)))


@dataclass
class EmbeddingState:
    """Parameters of the formation (``_f``) and dissolution (``_d``) models."""

    v_f: np.ndarray
    v_d: np.ndarray
    u_f: np.ndarray
    u_d: np.ndarray
    theta_f: np.ndarray
    theta_d: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        for name in ("v_f", "v_d", "u_f", "u_d"):
            setattr(self, name, np.ascontiguousarray(getattr(self, name), dtype=np.complex128))
        for name in ("theta_f", "theta_d"):
            setattr(self, name, np.ascontiguousarray(getattr(self, name), dtype=np.float64))
        shape = self.v_f.shape
        if len(shape) != 2 or shape[1] < 1:
            raise ValueError("node blocks must be (num_nodes, d) with d >= 1")
        for name in ("v_d", "u_f", "u_d"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        for name in ("theta_f", "theta_d"):
            if getattr(self, name).shape != (shape[1],):
                raise ValueError(f"{name} must have length d={shape[1]}")

    @property
    def num_nodes(self) -> int:
        return self.v_f.shape[0]

    @property
    def d(self) -> int:
        return self.v_f.shape[1]

    @property
    def W_f(self) -> np.ndarray:
        return np.exp(1j * self.theta_f)

    @property
    def W_d(self) -> np.ndarray:
        return np.exp(1j * self.theta_d)

    def copy(self) -> "EmbeddingState":
        return EmbeddingState(
            *(getattr(self, k).copy() for k in _BLOCKS), seed=self.seed
        )

    def max_abs(self) -> float:
        return max(float(np.abs(getattr(self, k)).max()) for k in _BLOCKS)

    def is_finite(self) -> bool:
        return all(np.isfinite(getattr(self, k)).all() for k in _BLOCKS)

    def equals(self, other: "EmbeddingState") -> bool:
        """Bitwise equality of every parameter block."""
        return all(
            getattr(self, k).tobytes() == getattr(other, k).tobytes() for k in _BLOCKS
        )


def init_state(num_nodes: int, d: int, seed: int | None = None) -> EmbeddingState:
    """Random initial parameters.

    Real and imaginary parts are uniform on ``[-0.5/d, 0.5/d]``; phases are
    uniform on ``[0, 2*pi)``.
    """
    if num_nodes < 1 or d < 1:
        raise ValueError("num_nodes and d must be >= 1")
    rng = np.random.default_rng(seed)
    half = 0.5 / d

    def block():
        re = rng.uniform(-half, half, size=(num_nodes, d))
        im = rng.uniform(-half, half, size=(num_nodes, d))
        return re + 1j * im

    v_f, v_d, u_f, u_d = block(), block(), block(), block()
    theta_f = rng.uniform(0.0, 2 * np.pi, size=d)
    theta_d = rng.uniform(0.0, 2 * np.pi, size=d)
    return EmbeddingState(v_f, v_d, u_f, u_d, theta_f, theta_d, seed=seed)


def dumps_state(state: EmbeddingState) -> bytes:
    header = {
        "version": MODEL_VERSION,
        "d": state.d,
        "num_nodes": state.num_nodes,
        "seed": state.seed,
        "blocks": list(_BLOCKS),
        "dtype": "<f8",
    }
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    parts = [MODEL_MAGIC, struct.pack("<I", len(head)), head]
    for k in _BLOCKS:
        arr = getattr(state, k)
        if np.iscomplexobj(arr):
            arr = np.stack([arr.real, arr.imag], axis=-1)
        parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return b"".join(parts)


def loads_state(data: bytes) -> EmbeddingState:
    if not data.startswith(MODEL_MAGIC):
        raise ValueError("not a semigraph model file")
    pos = len(MODEL_MAGIC)
    (hlen,) = struct.unpack_from("<I", data, pos)
    pos += 4
    header = json.loads(data[pos : pos + hlen].decode("utf-8"))
    pos += hlen
    if header.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {header.get('version')}")
    n, d = header["num_nodes"], header["d"]
    blocks = {}
    for k in header["blocks"]:
        if k.startswith("theta"):
            count, shape = d, (d,)
        else:
            count, shape = n * d * 2, (n, d, 2)
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=pos).reshape(shape)
        pos += count * 8
        blocks[k] = arr[..., 0] + 1j * arr[..., 1] if arr.ndim == 3 else arr.copy()
    if pos != len(data):
        raise ValueError("trailing bytes in model file")
    return EmbeddingState(**blocks, seed=header.get("seed"))


def save_state(state: EmbeddingState, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps_state(state))


def load_state(path: str | os.PathLike) -> EmbeddingState:
    with open(path, "rb") as fh:
        return loads_state(fh.read())
