"""Dense pure states of n-qudit registers.

Basis labels are 1-based (``|1>, |2>, ..., |d>``) at the API surface, while
flat amplitude indices are 0-based and big-endian in base ``d``: the label
list ``(i_1, ..., i_n)`` maps to ``sum_k (i_k - 1) * d**(n - k)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    LabelOutOfRange,
    LevelMismatch,
    NotNormalized,
    StateFileError,
    ZeroVector,
)

NORM_TOL = 1e-9
MAX_AMPLITUDES = 2**20


@dataclass(frozen=True, eq=False)
class QuditRegisterState:
    """Normalized amplitude vector of ``n`` qudits with ``d`` levels each.

    Use :func:`make_state` to build one; the constructor only checks shape.
    The amplitude array is made read-only so instances can be shared freely.
    """

    d: int
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.d < 2 or self.n < 1:
            raise DimensionMismatch(f"need d >= 2 and n >= 1, got d={self.d}, n={self.n}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.d**self.n:
            raise DimensionMismatch(
                f"expected {self.d ** self.n} amplitudes for d={self.d}, n={self.n}, got {amps.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.d**self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.d,) * self.n

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qudit."""
        return self.amplitudes.reshape(self.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_real(self, atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.amplitudes.imag) <= atol))

    def amplitude(self, labels: Sequence[int]) -> complex:
        return complex(self.amplitudes[basis_index(labels, self.d)])

    def with_amplitudes(self, amplitudes: np.ndarray) -> "QuditRegisterState":
        return QuditRegisterState(self.d, self.n, amplitudes)

    def __repr__(self):
        return f"QuditRegisterState(d={self.d}, n={self.n}, nnz={np.count_nonzero(self.amplitudes)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def check(self, atol: float = 1e-10) -> None:
        """Raise ``ValueError`` unless Hermitian, unit trace and PSD within ``atol``."""
        m = self.entries
        if not np.allclose(m, m.conj().T, atol=atol, rtol=0):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > atol:
            raise ValueError(f"density matrix trace {np.trace(m)} != 1")
        if self.eigenvalues().min() < -atol:
            raise ValueError("density matrix has negative eigenvalues")


def make_state(d: int, n: int, amplitudes, normalize: bool = False) -> QuditRegisterState:
    """Build a register state from a flat amplitude vector.

    Raises ``DimensionMismatch`` on a wrong length, ``ZeroVector`` on a null
    vector and ``NotNormalized`` when ``normalize`` is off and the norm is not 1.
    """
    if d < 2 or n < 1:
        raise DimensionMismatch(f"need d >= 2 and n >= 1, got d={d}, n={n}")
    if d**n > MAX_AMPLITUDES:
        raise DimensionMismatch(f"d**n = {d ** n} exceeds the dense limit {MAX_AMPLITUDES}")
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.size != d**n:
        raise DimensionMismatch(f"expected {d ** n} amplitudes, got {amps.size}")
    norm = np.linalg.norm(amps)
    if norm < 1e-300 or not np.isfinite(norm):
        raise ZeroVector("amplitude vector has zero (or non-finite) norm")
    if normalize:
        amps = amps / norm
    elif abs(norm - 1) > NORM_TOL:
        raise NotNormalized(f"norm {norm!r} deviates from 1 by more than {NORM_TOL}")
    return QuditRegisterState(d, n, amps)


def basis_state(labels: Sequence[int], d: int) -> QuditRegisterState:
    amps = np.zeros(d ** len(labels), dtype=complex)
    amps[basis_index(labels, d)] = 1
    return QuditRegisterState(d, len(labels), amps)


def uniform_state(d: int, n: int) -> QuditRegisterState:
    return make_state(d, n, np.full(d**n, d ** (-n / 2), dtype=complex))


def random_state(d: int, n: int, rng: np.random.Generator, real: bool = False) -> QuditRegisterState:
    """Gaussian-sampled state (Haar-distributed in the complex case)."""
    z = rng.normal(size=d**n)
    if not real:
        z = z + 1j * rng.normal(size=d**n)
    return make_state(d, n, z, normalize=True)


def basis_index(labels: Sequence[int], d: int) -> int:
    idx = 0
    for lab in labels:
        if not 1 <= lab <= d:
            raise LabelOutOfRange(f"label {lab} outside 1..{d}")
        idx = idx * d + (lab - 1)
    return idx


def basis_labels(index: int, d: int, n: int) -> tuple[int, ...]:
    """Inverse of :func:`basis_index`."""
    if not 0 <= index < d**n:
        raise IndexOutOfRange(f"flat index {index} outside 0..{d ** n - 1}")
    return tuple(int(i) + 1 for i in np.unravel_index(index, (d,) * n))


def tensor_product(a: QuditRegisterState, b: QuditRegisterState) -> QuditRegisterState:
    if a.d != b.d:
        raise LevelMismatch(f"cannot combine d={a.d} with d={b.d}")
    return QuditRegisterState(a.d, a.n + b.n, np.kron(a.amplitudes, b.amplitudes))


def product_of(factors: Iterable[np.ndarray]) -> np.ndarray:
    """Kronecker product of single-site vectors, first factor most significant."""
    out = np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def inner_product(a: QuditRegisterState, b: QuditRegisterState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.d != b.d or a.n != b.n:
        raise DimensionMismatch(f"shapes differ: (d={a.d}, n={a.n}) vs (d={b.d}, n={b.n})")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def reduced_density_matrix(state: QuditRegisterState, keep: int) -> DensityMatrix:
    """Density matrix of qudit ``keep`` (1-based) with every other qudit traced out."""
    if state.n < 2:
        raise IndexOutOfRange("partial trace needs at least two qudits")
    if not 1 <= keep <= state.n:
        raise IndexOutOfRange(f"subsystem {keep} outside 1..{state.n}")
    t = np.moveaxis(state.tensor(), keep - 1, 0).reshape(state.d, -1)
    return DensityMatrix(t @ t.conj().T)


def bipartite_matrix(state: QuditRegisterState, k: int) -> np.ndarray:
    """Amplitudes as a ``d**k x d**(n-k)`` matrix (cut after qudit ``k``)."""
    if not 1 <= k < state.n:
        raise IndexOutOfRange(f"cut position {k} outside 1..{state.n - 1}")
    return state.amplitudes.reshape(state.d**k, -1)


# -- state file format --------------------------------------------------------

def parse_state_text(text: str) -> QuditRegisterState:
    """Parse the line-oriented state format.

    ::

        # comment
        qudit d=3 n=2
        1 1 0.5773502691896258 0
        2 2 0.5773502691896258 0

    Each data line lists ``n`` labels followed by the real and imaginary
    part of the amplitude. Unlisted basis states are zero.
    """
    d = n = None
    amps = None
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if d is None:
            fields = line.split()
            try:
                if fields[0] != "qudit" or len(fields) != 3:
                    raise ValueError
                kv = dict(f.split("=", 1) for f in fields[1:])
                d, n = int(kv["d"]), int(kv["n"])
            except (ValueError, KeyError):
                raise StateFileError(f"line {lineno}: expected header 'qudit d=<int> n=<int>', got {raw!r}")
            if d < 2 or n < 1 or d**n > MAX_AMPLITUDES:
                raise StateFileError(f"line {lineno}: unsupported dimensions d={d}, n={n}")
            amps = np.zeros(d**n, dtype=complex)
            continue
        fields = line.split()
        if len(fields) != n + 2:
            raise StateFileError(f"line {lineno}: expected {n} labels and 2 floats, got {len(fields)} fields")
        try:
            labels = tuple(int(f) for f in fields[:n])
            re, im = float(fields[n]), float(fields[n + 1])
        except ValueError:
            raise StateFileError(f"line {lineno}: cannot parse {raw!r}")
        if labels in seen:
            raise StateFileError(f"line {lineno}: duplicate labels {labels}")
        seen.add(labels)
        try:
            amps[basis_index(labels, d)] = complex(re, im)
        except LabelOutOfRange as exc:
            raise StateFileError(f"line {lineno}: {exc}")
    if d is None:
        raise StateFileError("missing 'qudit d=<int> n=<int>' header")
    try:
        return make_state(d, n, amps)
    except (ZeroVector, NotNormalized) as exc:
        raise StateFileError(str(exc))


def read_state_file(path) -> QuditRegisterState:
    with open(path, encoding="utf-8") as fh:
        return parse_state_text(fh.read())


def format_state(state: QuditRegisterState, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"qudit d={state.d} n={state.n}")
    for idx, labels in enumerate(itertools.product(range(1, state.d + 1), repeat=state.n)):
        a = state.amplitudes[idx]
        if a != 0:
            lines.append(" ".join(map(str, labels)) + f" {float(a.real)!r} {float(a.imag)!r}")
    return "\n".join(lines) + "\n"
