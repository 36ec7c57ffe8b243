"""Angle/phase coordinates for product states and the overlap objective.

A single qudit with ``d`` levels is parameterised by ``d - 1`` angles
``alpha_1 .. alpha_{d-1}`` and ``d - 1`` phases ``chi_1 .. chi_{d-1}``::

    c_d = cos(alpha_1)
    c_1 = exp(i chi_1) sin(alpha_1) cos(alpha_2) cos(alpha_3) ... cos(alpha_{d-1})
    c_m = exp(i chi_m) sin(alpha_1) sin(alpha_m) cos(alpha_2) ... cos(alpha_{m-1}),  2 <= m <= d-1

For ``d = 3`` this is the familiar qutrit form with ``theta = alpha_1`` and
``gamma = alpha_2``. See ``docs/hyperspherical.md`` for coefficient tables.

Full mode: angles in ``[0, pi/2]``, phases in ``[0, 2 pi)``.
Real mode: phases are all zero and every angle ranges over ``[-pi/2, pi/2]``
so that sign choices are absorbed into the angles.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, RangeViolation
from .qudit import QuditRegisterState, product_of

HALF_PI = np.pi / 2
TWO_PI = 2 * np.pi
_RANGE_TOL = 1e-12


# -- the ladder ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _ladder_table(d: int) -> np.ndarray:
    """Which trig function of angle ``k`` enters the magnitude of level ``m``.

    Entry ``[m, k]`` is 0 (absent), 1 (sin) or 2 (cos); rows are levels
    ``1..d`` (0-based), columns angles ``alpha_1..alpha_{d-1}`` (0-based).
    """
    t = np.zeros((d, d - 1), dtype=np.int8)
    t[d - 1, 0] = 2
    for m in range(d - 1):
        t[m, 0] = 1
    for k in range(1, d - 1):
        t[0, k] = 2
    for m in range(1, d - 1):
        t[m, m] = 1
        t[m, 1:m] = 2
    return t


def factor_magnitudes(alpha: np.ndarray) -> np.ndarray:
    """Real ladder amplitudes for angle rows ``alpha[..., d-1]`` -> ``[..., d]``."""
    alpha = np.asarray(alpha, dtype=float)
    d = alpha.shape[-1] + 1
    t = _ladder_table(d)
    s, c = np.sin(alpha)[..., None, :], np.cos(alpha)[..., None, :]
    terms = np.where(t == 1, s, np.where(t == 2, c, 1.0))
    return terms.prod(axis=-1)


def factor_vectors(alpha: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Single-site state vectors ``[..., d]`` from angles and phases (no range checks)."""
    mags = factor_magnitudes(alpha)
    phases = np.asarray(phases, dtype=float)
    ph = np.concatenate([np.exp(1j * phases), np.ones(phases.shape[:-1] + (1,))], axis=-1)
    return mags * ph


def factor_jacobian(alpha: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Derivatives of one factor vector, shape ``(2(d-1), d)``.

    Rows are ordered ``alpha_1..alpha_{d-1}, chi_1..chi_{d-1}``.
    """
    alpha = np.asarray(alpha, dtype=float)
    d = alpha.size + 1
    t = _ladder_table(d)
    s, c = np.sin(alpha), np.cos(alpha)
    terms = np.where(t == 1, s, np.where(t == 2, c, 1.0))
    dterms = np.where(t == 1, c, np.where(t == 2, -s, 0.0))
    ph = np.concatenate([np.exp(1j * np.asarray(phases, dtype=float)), [1.0]])
    jac = np.zeros((2 * (d - 1), d), dtype=complex)
    for k in range(d - 1):
        others = np.delete(terms, k, axis=1).prod(axis=1)
        jac[k] = dterms[:, k] * others * ph
    f = terms.prod(axis=1) * ph
    for m in range(d - 1):
        jac[d - 1 + m, m] = 1j * f[m]
    return jac


def factors_to_params(vec: np.ndarray, real: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Invert :func:`factor_vectors` for one unit vector, up to global phase.

    Returns canonical ``(alpha, phases)`` inside the documented ranges.
    """
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    d = v.size
    last = v[-1]
    if abs(last) > 1e-300:
        v = v * (abs(last) / last)
    elif real:
        nz = np.flatnonzero(np.abs(v) > 1e-300)[0]
        v = v * (abs(v[nz]) / v[nz])
    head = v[:-1]
    alpha = np.zeros(d - 1)
    phases = np.zeros(d - 1)
    if real:
        u = head.real
        sign = -1.0 if u[0] < 0 else 1.0
        r = np.linalg.norm(u)
        alpha[0] = np.arctan2(sign * r, v[-1].real)
        if r > 0:
            u = sign * u / r
    else:
        u = np.abs(head)
        phases = np.mod(np.angle(head), TWO_PI)
        phases[(np.abs(head) == 0) | (phases >= TWO_PI)] = 0.0
        r = np.linalg.norm(u)
        alpha[0] = np.arctan2(r, v[-1].real)
        if r > 0:
            u = u / r
    # alpha_m = atan2(u_m, |u_1, u_{m+1}, ..., u_{d-1}|)
    for m in range(1, d - 1):
        tail = np.sqrt(u[0] ** 2 + np.sum(u[m + 1:] ** 2))
        alpha[m] = np.arctan2(u[m], tail)
    return alpha, phases


# -- angle containers -----------------------------------------------------------

def _check_range(name: str, x: np.ndarray, lo: float, hi: float, closed_hi: bool = True) -> None:
    bad = (x < lo - _RANGE_TOL) | ((x > hi + _RANGE_TOL) if closed_hi else (x >= hi))
    if np.any(bad):
        raise RangeViolation(f"{name} outside [{lo:.6g}, {hi:.6g}{']' if closed_hi else ')'}: {x[bad]}")


@dataclass(frozen=True, eq=False)
class QuditProductAngles:
    """Per-site angles ``alpha[j]`` and phases ``phases[j]``, each of length ``d - 1``."""

    alpha: np.ndarray
    phases: np.ndarray
    real: bool = False

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float, ndmin=2)
        p = np.array(self.phases, dtype=float, ndmin=2)
        if a.shape != p.shape or a.shape[1] < 1:
            raise DimensionMismatch(f"alpha {a.shape} and phases {p.shape} must share shape (n, d-1)")
        if self.real:
            _check_range("alpha", a, -HALF_PI, HALF_PI)
            if np.any(p != 0):
                raise RangeViolation("real mode carries no phases")
        else:
            _check_range("alpha", a, 0.0, HALF_PI)
            _check_range("phases", p, 0.0, TWO_PI, closed_hi=False)
        a.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "phases", p)

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    @property
    def d(self) -> int:
        return self.alpha.shape[1] + 1

    def factors(self) -> np.ndarray:
        return factor_vectors(self.alpha, self.phases)

    def to_vector(self) -> np.ndarray:
        """Flat parameters, per site ``alpha_1..alpha_{d-1}, chi_1..chi_{d-1}``."""
        return np.concatenate([self.alpha, self.phases], axis=1).reshape(-1)

    @classmethod
    def from_factors(cls, factors, real: bool = False) -> "QuditProductAngles":
        params = [factors_to_params(f, real=real) for f in factors]
        return cls(np.array([p[0] for p in params]), np.array([p[1] for p in params]), real=real)

    @classmethod
    def wrapped(cls, alpha, phases, real: bool = False) -> "QuditProductAngles":
        """Canonical in-range angles for arbitrary (unconstrained) inputs."""
        return cls.from_factors(factor_vectors(np.atleast_2d(alpha), np.atleast_2d(phases)), real=real)

    @classmethod
    def random(cls, n: int, d: int, rng: np.random.Generator, real: bool = False) -> "QuditProductAngles":
        if real:
            return cls(rng.uniform(-HALF_PI, HALF_PI, (n, d - 1)), np.zeros((n, d - 1)), real=True)
        return cls(rng.uniform(0, HALF_PI, (n, d - 1)), rng.uniform(0, TWO_PI, (n, d - 1)))


@dataclass(frozen=True, eq=False)
class QutritProductAngles:
    """Qutrit coordinates ``(theta, gamma, chi, chi')`` per site."""

    theta: np.ndarray
    gamma: np.ndarray
    chi: np.ndarray
    chi_prime: np.ndarray
    real: bool = False

    def __post_init__(self):
        arrs = [np.array(getattr(self, f), dtype=float, ndmin=1) for f in ("theta", "gamma", "chi", "chi_prime")]
        if len({a.shape for a in arrs}) != 1 or arrs[0].ndim != 1:
            raise DimensionMismatch("theta, gamma, chi, chi_prime must be equal-length vectors")
        for name, a in zip(("theta", "gamma", "chi", "chi_prime"), arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        self.to_qudit()  # range validation

    @property
    def n(self) -> int:
        return self.theta.size

    def to_qudit(self) -> QuditProductAngles:
        alpha = np.stack([self.theta, self.gamma], axis=1)
        phases = np.stack([self.chi, self.chi_prime], axis=1)
        return QuditProductAngles(alpha, phases, real=self.real)

    @classmethod
    def from_qudit(cls, angles: QuditProductAngles) -> "QutritProductAngles":
        if angles.d != 3:
            raise DimensionMismatch(f"qutrit angles need d=3, got d={angles.d}")
        a, p = angles.alpha, angles.phases
        return cls(a[:, 0], a[:, 1], p[:, 0], p[:, 1], real=angles.real)


def as_qudit_angles(angles) -> QuditProductAngles:
    if isinstance(angles, QutritProductAngles):
        return angles.to_qudit()
    if isinstance(angles, QuditProductAngles):
        return angles
    raise TypeError(f"expected product angles, got {type(angles).__name__}")


# -- states and the objective --------------------------------------------------------

def qutrit_product_state(angles: QutritProductAngles) -> QuditRegisterState:
    return qudit_product_state(angles.to_qudit(), 3)


def qudit_product_state(angles: QuditProductAngles, d: int | None = None) -> QuditRegisterState:
    angles = as_qudit_angles(angles)
    if d is not None and d != angles.d:
        raise DimensionMismatch(f"angles describe d={angles.d}, asked for d={d}")
    return QuditRegisterState(angles.d, angles.n, product_of(angles.factors()))


def contract_except(psi_tensor: np.ndarray, conj_factors: list[np.ndarray], skip: int | None) -> np.ndarray:
    """Contract every site but ``skip`` against the given (already conjugated) vectors."""
    t = psi_tensor
    # contract from the last site down so axis numbering of earlier sites stays valid
    for j in range(t.ndim - 1, -1, -1):
        if j == skip:
            continue
        t = np.tensordot(t, conj_factors[j], axes=([j], [0]))
    return t


def _check_dims(psi: QuditRegisterState, angles: QuditProductAngles) -> None:
    if psi.d != angles.d or psi.n != angles.n:
        raise DimensionMismatch(f"state (d={psi.d}, n={psi.n}) vs angles (d={angles.d}, n={angles.n})")


def overlap_probability(psi: QuditRegisterState, angles) -> float:
    """``|<e(angles)|psi>|^2``."""
    angles = as_qudit_angles(angles)
    _check_dims(psi, angles)
    conj = list(angles.factors().conj())
    return float(abs(contract_except(psi.tensor(), conj, None)) ** 2)


def overlap_gradient(psi: QuditRegisterState, angles) -> np.ndarray:
    """Gradient of :func:`overlap_probability`, ordered like ``to_vector()``.

    In real mode the phase entries are the derivatives at zero phase, which
    vanish identically for real ``psi``.
    """
    angles = as_qudit_angles(angles)
    _check_dims(psi, angles)
    t = psi.tensor()
    factors = angles.factors()
    conj = list(factors.conj())
    out = []
    z = None
    envs = []
    for j in range(angles.n):
        env = contract_except(t, conj, j)
        envs.append(env)
        if z is None:
            z = np.vdot(factors[j], env)
    for j in range(angles.n):
        jac = factor_jacobian(angles.alpha[j], angles.phases[j])
        dz = jac.conj() @ envs[j]
        out.append(2 * (np.conj(z) * dz).real)
    return np.concatenate(out)


def overlap_from_vector(psi: QuditRegisterState, params: np.ndarray, d: int | None = None) -> float:
    """Objective on unconstrained flat parameters (periodic extension, no range checks)."""
    d = psi.d if d is None else d
    p = np.asarray(params, dtype=float).reshape(psi.n, 2, d - 1)
    conj = list(factor_vectors(p[:, 0], p[:, 1]).conj())
    return float(abs(contract_except(psi.tensor(), conj, None)) ** 2)
