"""Maximal product-state overlap ``P_max`` and the Groverian measure.

``P_max(psi) = max_e |<e|psi>|^2`` over product states ``e``; the Groverian
entanglement is ``G = sqrt(1 - P_max)``. Four routes are provided:

* :func:`pmax_numeric` - multi-start alternating single-site ascent (any d, n)
* :func:`pmax_closed_form_two_qutrit_real` - published closed form, real 3x3 only
* :func:`pmax_schmidt_bipartite` - largest squared Schmidt coefficient (exact for n=2)
* :func:`pmax_grid` - brute force over a regular angle grid (lower bound)
"""
from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, GroverianError, NotNormalized, OutOfRange
from .product import HALF_PI, TWO_PI, QuditProductAngles, factor_vectors
from .qudit import QuditRegisterState, bipartite_matrix

log = logging.getLogger(__name__)

METHODS = ("numeric", "closed_form_2qutrit", "schmidt", "grid")
CLAMP_BAND = 1e-9
GRID_BUDGET = 10**8
_LETTERS = "abcdefghijklmnopqrstuvwxy"


class MethodInapplicable(GroverianError, ValueError):
    """The requested route does not apply to this state."""


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("GROVERIAN_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_sweeps: int = 500
    tolerance: float = 1e-10
    seed: int = 0
    real_only: bool = False
    threads: int = field(default_factory=default_threads)

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass(frozen=True)
class EntanglementReport:
    p_max: float
    g: float
    method: str
    converged: bool = True
    best_angles: QuditProductAngles | None = None
    restarts_used: int = 0
    sweeps: int = 0

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "p_max": self.p_max,
            "g": self.g,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
        }
        if self.best_angles is not None:
            out["best_angles"] = {
                "alpha": self.best_angles.alpha.tolist(),
                "phases": self.best_angles.phases.tolist(),
                "real": self.best_angles.real,
            }
        return out


def groverian(p_max: float) -> float:
    """``sqrt(1 - p_max)``; values up to ``1 + 1e-9`` are clamped to 1."""
    if p_max < 0 or p_max > 1 + CLAMP_BAND or not np.isfinite(p_max):
        raise OutOfRange(f"p_max={p_max!r} outside [0, 1]")
    return float(np.sqrt(1.0 - min(float(p_max), 1.0)))


def _report(p: float, method: str, **kw) -> EntanglementReport:
    p = min(float(p), 1.0) if p <= 1 + CLAMP_BAND else float(p)
    return EntanglementReport(p_max=p, g=groverian(p), method=method, **kw)


# -- alternating single-site ascent --------------------------------------------------------

def _env_subscripts(n: int, j: int) -> str:
    psi = _LETTERS[:n]
    ops = [f"z{_LETTERS[k]}" for k in range(n) if k != j]
    return f"{psi},{','.join(ops)}->z{_LETTERS[j]}"


class _Ascent:
    """Batched alternating maximisation of ``|<f_1 x ... x f_n|psi>|^2``.

    Holding every factor but site ``j`` fixed, the overlap is ``<f_j|env_j>``
    and its global maximiser is ``env_j / |env_j|``. Each row of the batch is
    an independent restart.
    """

    def __init__(self, psi: QuditRegisterState, real: bool):
        if psi.n > len(_LETTERS):
            raise DimensionMismatch(f"at most {len(_LETTERS)} sites supported, got {psi.n}")
        self.t = psi.tensor()
        self.n = psi.n
        self.real = real
        self.subs = [_env_subscripts(self.n, j) for j in range(self.n)]

    def env(self, F: np.ndarray, j: int) -> np.ndarray:
        ops = [F[:, k].conj() for k in range(self.n) if k != j]
        if self.n == 1:
            return np.broadcast_to(self.t, (F.shape[0],) + self.t.shape).copy()
        return np.einsum(self.subs[j], self.t, *ops, optimize=self.n > 2)

    def best_factor(self, env: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Optimal single-site vectors for each row and the resulting overlaps."""
        if not self.real:
            norm = np.linalg.norm(env, axis=1)
            safe = np.where(norm > 0, norm, 1.0)
            return env / safe[:, None], norm**2
        if np.all(np.abs(env.imag) <= 1e-15 * (1 + np.abs(env.real))):
            x = env.real
            norm = np.linalg.norm(x, axis=1)
            safe = np.where(norm > 0, norm, 1.0)
            return (x / safe[:, None]).astype(complex), norm**2
        # real unit f maximising |f.(x+iy)|^2 is the top eigenvector of xx^T + yy^T
        m = np.einsum("ri,rj->rij", env.real, env.real) + np.einsum("ri,rj->rij", env.imag, env.imag)
        w, v = np.linalg.eigh(m)
        return v[:, :, -1].astype(complex), w[:, -1]

    def sweep(self, F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        F = F.copy()
        p = None
        for j in range(self.n):
            e = self.env(F, j)
            f, p_new = self.best_factor(e)
            keep = p_new <= 0
            if np.any(keep):
                f[keep] = F[keep, j]
            F[:, j] = f
            p = p_new
        return F, p

    def run(self, F: np.ndarray, max_sweeps: int, tol: float):
        """Sweep every row until its per-sweep gain drops below ``tol``.

        Returns final factors, overlaps, convergence flags, sweep counts and
        the per-row overlap history (one entry per sweep).
        """
        R = F.shape[0]
        p = np.full(R, -np.inf)
        converged = np.zeros(R, dtype=bool)
        sweeps = np.zeros(R, dtype=int)
        history = [[] for _ in range(R)]
        active = np.arange(R)
        for _ in range(max_sweeps):
            if active.size == 0:
                break
            F_new, p_new = self.sweep(F[active])
            gain = p_new - p[active]
            F[active] = F_new
            p[active] = p_new
            sweeps[active] += 1
            for r, val in zip(active, p_new):
                history[r].append(float(val))
            done = gain < tol
            converged[active[done]] = True
            active = active[~done]
        return F, p, converged, sweeps, history

    def polish(self, F: np.ndarray, max_sweeps: int, step_tol: float = 1e-13) -> tuple[np.ndarray, float, int]:
        """Keep sweeping one restart until its factors stop moving."""
        F = F[None].copy()
        p = 0.0
        for k in range(max_sweeps):
            F_new, p_arr = self.sweep(F)
            step = np.max(np.abs(F_new - F))
            F, p = F_new, float(p_arr[0])
            if step < step_tol:
                return F[0], p, k + 1
        return F[0], p, max_sweeps


def _initial_factors(psi: QuditRegisterState, config: OptimizerConfig, indices) -> np.ndarray:
    out = []
    for r in indices:
        rng = np.random.default_rng([config.seed & 0xFFFFFFFFFFFFFFFF, r])
        angles = QuditProductAngles.random(psi.n, psi.d, rng, real=config.real_only)
        out.append(angles.factors())
    return np.array(out, dtype=complex)


def pmax_numeric(psi: QuditRegisterState, config: OptimizerConfig | None = None,
                 return_history: bool = False):
    """Maximal product overlap by multi-start alternating ascent.

    Restart ``r`` is seeded from ``(config.seed, r)``, so the result depends
    only on seed and restart count, never on ``config.threads``.
    With ``return_history`` the per-restart, per-sweep overlap values are
    returned alongside the report.
    """
    config = config or OptimizerConfig()
    if abs(psi.norm() - 1) > 1e-9:
        raise NotNormalized(f"state norm {psi.norm()} != 1")
    real = config.real_only
    asc = _Ascent(psi, real=real)

    chunks = np.array_split(np.arange(config.restarts), min(config.threads, config.restarts))

    def work(idx):
        F0 = _initial_factors(psi, config, idx)
        return asc.run(F0, config.max_sweeps, config.tolerance)

    if len(chunks) == 1:
        results = [work(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as ex:
            results = list(ex.map(work, chunks))

    F = np.concatenate([r[0] for r in results])
    p = np.concatenate([r[1] for r in results])
    conv = np.concatenate([r[2] for r in results])
    sweeps = np.concatenate([r[3] for r in results])
    history = [h for r in results for h in r[4]]

    best = int(np.argmax(p))  # first maximal restart wins ties
    f_best, p_best, extra = asc.polish(F[best], config.max_sweeps)
    p_best = max(p_best, float(p[best]))
    if not conv[best]:
        log.warning("alternating ascent hit max_sweeps=%d before converging", config.max_sweeps)
    report = _report(
        p_best,
        "numeric",
        converged=bool(conv[best]),
        best_angles=QuditProductAngles.from_factors(f_best, real=real),
        restarts_used=config.restarts,
        sweeps=int(sweeps[best]) + extra,
    )
    return (report, history) if return_history else report


# -- closed form, real two-qutrit ------------------------------------------------------------

def two_qutrit_real_matrix(psi: QuditRegisterState) -> np.ndarray:
    """Coefficient matrix ``a[i-1, j-1]`` of ``sum a_ij |ij>`` for a real two-qutrit state."""
    if psi.d != 3 or psi.n != 2:
        raise MethodInapplicable(f"closed form needs two qutrits (d=3, n=2), got d={psi.d}, n={psi.n}")
    if not psi.is_real():
        raise MethodInapplicable("closed form is restricted to states with real coefficients")
    return psi.amplitudes.real.reshape(3, 3)


def pmax_closed_form_two_qutrit_real(a) -> float:
    """Published two-qutrit formula, evaluated exactly as printed.

    With ``A = |(a11 - a22, a21 + a12)|``, ``B = |(a11 + a22, a21 - a12)|``,
    ``C = |(a13, a23)|`` and ``D = |(a31, a32)|``::

        P = 1/4 [ sqrt((a33 - (A+B)/2)^2 + (C+D)^2) + sqrt((a33 + (A+B)/2)^2 + (C-D)^2) ]^2

    It agrees with the exact value on the documented examples but not in
    general; see ``docs/closed_form.md`` for a counterexample.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (3, 3):
        raise DimensionMismatch(f"expected a 3x3 coefficient matrix, got {a.shape}")
    if abs(np.sum(a**2) - 1) > 1e-9:
        raise NotNormalized(f"sum of squared coefficients is {np.sum(a ** 2)!r}, not 1")
    A = np.hypot(a[0, 0] - a[1, 1], a[1, 0] + a[0, 1])
    B = np.hypot(a[0, 0] + a[1, 1], a[1, 0] - a[0, 1])
    C = np.hypot(a[0, 2], a[1, 2])
    D = np.hypot(a[2, 0], a[2, 1])
    h = (A + B) / 2
    return float(0.25 * (np.hypot(a[2, 2] - h, C + D) + np.hypot(a[2, 2] + h, C - D)) ** 2)


# -- Schmidt oracle ------------------------------------------------------------------------------

def pmax_schmidt_bipartite(psi: QuditRegisterState, cut: int = 1) -> float:
    """Largest squared singular value across the cut after qudit ``cut``.

    Exact ``P_max`` for two qudits; for more qudits it bounds ``P_max`` from above.
    """
    s = np.linalg.svd(bipartite_matrix(psi, cut), compute_uv=False)
    return float(s[0] ** 2)


# -- brute-force grid ------------------------------------------------------------------------------

def _site_grid(d: int, resolution: int, real: bool) -> np.ndarray:
    quarter = np.linspace(0, HALF_PI, resolution)
    if real:
        axis = np.concatenate([-quarter[:0:-1], quarter])
        alpha = np.array(list(itertools.product(axis, repeat=d - 1)))
        phases = np.zeros_like(alpha)
    else:
        ring = np.linspace(0, TWO_PI, resolution, endpoint=False)
        combos = np.array(list(itertools.product(*([quarter] * (d - 1) + [ring] * (d - 1)))))
        alpha, phases = combos[:, : d - 1], combos[:, d - 1:]
    return factor_vectors(alpha, phases)


def grid_size(d: int, n: int, resolution: int, real: bool) -> int:
    """Number of product states visited by :func:`pmax_grid`."""
    per_axis = 2 * resolution - 1 if real else resolution
    return (per_axis ** ((d - 1) * (1 if real else 2))) ** n


def pmax_grid(psi: QuditRegisterState, resolution: int = 40, real_only: bool | None = None,
              budget: int = GRID_BUDGET, block: int = 1024) -> float:
    """Maximum of the overlap over a regular grid of angles (and phases).

    ``resolution`` counts grid points across ``[0, pi/2]`` for every angle;
    in real mode that axis is mirrored onto ``[-pi/2, pi/2]``, and in complex
    mode each phase gets ``resolution`` points on ``[0, 2 pi)``.
    ``real_only`` defaults to whether ``psi`` has real amplitudes. Raises
    ``BudgetExceeded`` when the number of product states exceeds ``budget``.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    real = psi.is_real() if real_only is None else real_only
    total = grid_size(psi.d, psi.n, resolution, real)
    if total > budget:
        raise BudgetExceeded(f"grid needs {total:.3g} evaluations, budget is {budget:.3g}")
    G = _site_grid(psi.d, resolution, real).conj()
    t = psi.tensor()
    if psi.n == 1:
        return float(np.max(np.abs(G @ t) ** 2))
    best = 0.0
    # loop over grid points of the leading n-2 sites, blocked matrix products for the last two
    for combo in itertools.product(range(G.shape[0]), repeat=psi.n - 2):
        m = t
        for g in combo:
            m = np.tensordot(G[g], m, axes=([0], [0]))
        right = m @ G.T
        for lo in range(0, G.shape[0], block):
            z = G[lo:lo + block] @ right
            best = max(best, float(np.max(z.real**2 + z.imag**2)))
    return best


def measure(psi: QuditRegisterState, method: str, config: OptimizerConfig | None = None,
            resolution: int = 40) -> EntanglementReport:
    """Dispatch to one route and wrap the result in an :class:`EntanglementReport`."""
    if method == "numeric":
        return pmax_numeric(psi, config)
    if method == "closed_form_2qutrit":
        return _report(pmax_closed_form_two_qutrit_real(two_qutrit_real_matrix(psi)), method)
    if method == "schmidt":
        if psi.n != 2:
            raise MethodInapplicable(f"Schmidt value equals P_max only for two qudits, got n={psi.n}")
        return _report(pmax_schmidt_bipartite(psi), method)
    if method == "grid":
        return _report(pmax_grid(psi, resolution), method)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
