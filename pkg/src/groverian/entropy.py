"""Entropy of entanglement for two-qudit pure states."""
from __future__ import annotations

import numpy as np

from .errors import IndexOutOfRange, NotBipartite
from .qudit import QuditRegisterState, reduced_density_matrix

EIG_FLOOR = 1e-12


def _require_bipartite(psi: QuditRegisterState) -> None:
    if psi.n != 2:
        raise NotBipartite(f"expected two qudits, got n={psi.n}")


def schmidt_coefficients(psi: QuditRegisterState) -> np.ndarray:
    """Squared Schmidt coefficients in non-increasing order."""
    _require_bipartite(psi)
    s = np.linalg.svd(psi.amplitudes.reshape(psi.d, psi.d), compute_uv=False)
    return s**2


def von_neumann_entropy(psi: QuditRegisterState, traced_out: int = 2, log_base: float | None = None) -> float:
    """``-Tr[rho log rho]`` of the qudit left after tracing out ``traced_out``.

    The logarithm defaults to base ``d`` so a maximally entangled pair scores 1.
    Eigenvalues below ``1e-12`` count as zero.
    """
    _require_bipartite(psi)
    if traced_out not in (1, 2):
        raise IndexOutOfRange(f"traced_out must be 1 or 2, got {traced_out}")
    base = psi.d if log_base is None else log_base
    if base <= 0 or base == 1:
        raise ValueError(f"invalid log base {base}")
    rho = reduced_density_matrix(psi, keep=3 - traced_out)
    lam = np.clip(rho.eigenvalues(), 0.0, None)
    lam = lam[lam > EIG_FLOOR]
    lam = lam / lam.sum()
    s = float(-np.sum(lam * np.log(lam)) / np.log(base))
    return s if s > 0 else 0.0
