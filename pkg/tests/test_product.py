import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groverian.errors import DimensionMismatch, RangeViolation
from groverian.measure import OptimizerConfig, pmax_numeric
from groverian.product import (
    HALF_PI,
    TWO_PI,
    QuditProductAngles,
    QutritProductAngles,
    factor_vectors,
    overlap_from_vector,
    overlap_gradient,
    overlap_probability,
    qudit_product_state,
    qutrit_product_state,
)
from groverian.qudit import basis_state, make_state, random_state

FD_STEP = 1e-5


def central_difference(psi, angles):
    """Independent oracle: central differences of the objective in flat parameters."""
    x = angles.to_vector() if isinstance(angles, QuditProductAngles) else angles.to_qudit().to_vector()
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = FD_STEP
        g[i] = (overlap_from_vector(psi, x + e) - overlap_from_vector(psi, x - e)) / (2 * FD_STEP)
    return g


def eq19_overlap(a, t1, t2, g1, g2):
    """Hand expansion of |<e|psi>|^2 for real two-qutrit coefficients a[i-1][j-1]."""
    c, s = np.cos, np.sin
    return (
        a[2, 2] * c(t1) * c(t2)
        + (a[2, 0] * c(g2) + a[2, 1] * s(g2)) * c(t1) * s(t2)
        + (a[0, 2] * c(g1) + a[1, 2] * s(g1)) * s(t1) * c(t2)
        + (a[0, 0] * c(g1) * c(g2) + a[0, 1] * c(g1) * s(g2)
           + a[1, 0] * s(g1) * c(g2) + a[1, 1] * s(g1) * s(g2)) * s(t1) * s(t2)
    ) ** 2


def qutrit(theta, gamma, chi=None, chi_p=None, real=False):
    theta = np.atleast_1d(theta)
    gamma = np.atleast_1d(gamma)
    z = np.zeros_like(theta, dtype=float)
    return QutritProductAngles(theta, gamma, z if chi is None else chi, z if chi_p is None else chi_p, real=real)


def test_qutrit_single_site_examples():
    np.testing.assert_allclose(qutrit_product_state(qutrit(0.0, 0.3)).amplitudes, [0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(qutrit_product_state(qutrit(HALF_PI, 0.0)).amplitudes, [1, 0, 0], atol=1e-15)


def test_qutrit_two_site_expansion():
    e = qutrit_product_state(qutrit([HALF_PI, HALF_PI], [np.pi / 4, np.pi / 4]))
    expected = np.zeros(9)
    expected[[0, 1, 3, 4]] = 0.5  # |11>, |12>, |21>, |22>
    np.testing.assert_allclose(e.amplitudes, expected, atol=1e-15)


def test_qutrit_factor_matches_formula(rng):
    th, ga = rng.uniform(0, HALF_PI, 2)
    ch, chp = rng.uniform(0, TWO_PI, 2)
    e = qutrit_product_state(QutritProductAngles([th], [ga], [ch], [chp]))
    expected = [np.exp(1j * ch) * np.sin(th) * np.cos(ga), np.exp(1j * chp) * np.sin(th) * np.sin(ga), np.cos(th)]
    np.testing.assert_allclose(e.amplitudes, expected, atol=1e-15)


def test_coefficient_product_rule(rng):
    """Each product coefficient is the product of the per-site coefficients of its labels."""
    ang = QutritProductAngles(*rng.uniform(0, HALF_PI, (2, 3)), *rng.uniform(0, TWO_PI, (2, 3)))
    e = qutrit_product_state(ang)
    single = [qutrit_product_state(QutritProductAngles([ang.theta[k]], [ang.gamma[k]], [ang.chi[k]],
                                                       [ang.chi_prime[k]])).amplitudes for k in range(3)]
    for i1 in range(3):
        for i2 in range(3):
            for i3 in range(3):
                assert e.amplitudes[9 * i1 + 3 * i2 + i3] == pytest.approx(
                    single[0][i1] * single[1][i2] * single[2][i3], abs=1e-15)


def test_range_violations():
    with pytest.raises(RangeViolation):
        qutrit(2.0, 0.1)
    with pytest.raises(RangeViolation):
        qutrit(0.1, 0.1, chi=np.array([TWO_PI]))
    with pytest.raises(RangeViolation):
        QuditProductAngles([[-0.1, 0.2]], [[0, 0]])
    with pytest.raises(RangeViolation):
        QuditProductAngles([[-0.1, 0.2]], [[0.5, 0]], real=True)
    QuditProductAngles([[-0.1, 0.2]], [[0, 0]], real=True)


def test_d2_bloch_form():
    a = QuditProductAngles([[0.3]], [[1.1]])
    np.testing.assert_allclose(qudit_product_state(a, 2).amplitudes,
                               [np.exp(1.1j) * np.sin(0.3), np.cos(0.3)], atol=1e-15)


def test_d4_ladder_at_quarter_pi():
    # levels: 1 -> s1 c2 c3, 2 -> s1 s2, 3 -> s1 c2 s3, 4 -> c1, all trig values sqrt(2)/2
    r = np.sqrt(2) / 2
    f = qudit_product_state(QuditProductAngles(np.full((1, 3), np.pi / 4), np.zeros((1, 3))), 4)
    np.testing.assert_allclose(f.amplitudes, [r**3, r**2, r**3, r], atol=1e-15)
    assert f.norm() == pytest.approx(1, abs=1e-15)


def test_d_mismatch():
    with pytest.raises(DimensionMismatch):
        qudit_product_state(QuditProductAngles([[0.1, 0.2]], [[0, 0]]), 4)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 7])
def test_factors_unit_norm(d, rng):
    for real in (False, True):
        ang = QuditProductAngles.random(3, d, rng, real=real)
        assert qudit_product_state(ang).norm() == pytest.approx(1, abs=1e-12)


def test_qudit_reduces_to_qutrit(rng):
    for _ in range(100):
        q = QutritProductAngles(*rng.uniform(0, HALF_PI, (2, 2)), *rng.uniform(0, TWO_PI, (2, 2)))
        a = qudit_product_state(q.to_qudit(), 3).amplitudes
        b = qutrit_product_state(q).amplitudes
        assert np.max(np.abs(a - b)) <= 1e-14


@pytest.mark.parametrize("d", [2, 3, 4, 6])
@pytest.mark.parametrize("real", [False, True])
def test_from_factors_roundtrip(d, real, rng):
    for _ in range(20):
        ang = QuditProductAngles.random(2, d, rng, real=real)
        back = QuditProductAngles.from_factors(ang.factors(), real=real)
        np.testing.assert_allclose(back.alpha, ang.alpha, atol=1e-12)
        np.testing.assert_allclose(back.phases, ang.phases, atol=1e-12)


@pytest.mark.parametrize("d", [3, 4])
def test_from_factors_covers_arbitrary_vectors(d, rng):
    """Any unit vector is reproduced up to global phase (complex) or sign (real)."""
    for real in (False, True):
        v = rng.normal(size=d) + (0 if real else 1j * rng.normal(size=d))
        v /= np.linalg.norm(v)
        back = QuditProductAngles.from_factors([v], real=real).factors()[0]
        assert abs(np.vdot(back, v)) == pytest.approx(1, abs=1e-12)


def test_overlap_examples(max_entangled, rng):
    ang = QuditProductAngles.random(2, 3, rng)
    assert overlap_probability(qudit_product_state(ang), ang) == pytest.approx(1, abs=1e-12)
    e11 = qutrit([HALF_PI, HALF_PI], [0.0, 0.0])
    assert overlap_probability(max_entangled, e11) == pytest.approx(1 / 3, abs=1e-15)


def test_overlap_matches_hand_expansion(rng):
    for _ in range(50):
        a = rng.normal(size=(3, 3))
        a /= np.linalg.norm(a)
        psi = make_state(3, 2, a.reshape(-1))
        t1, t2, g1, g2 = rng.uniform(0, HALF_PI, 4)
        p = overlap_probability(psi, qutrit([t1, t2], [g1, g2]))
        assert p == pytest.approx(eq19_overlap(a, t1, t2, g1, g2), abs=1e-14)


def test_overlap_dimension_mismatch(max_entangled):
    with pytest.raises(DimensionMismatch):
        overlap_probability(max_entangled, qutrit([0.1], [0.1]))
    with pytest.raises(DimensionMismatch):
        overlap_gradient(max_entangled, QuditProductAngles(np.zeros((2, 3)), np.zeros((2, 3))))


@given(seed=st.integers(0, 2**32 - 1), k=st.integers(0, 3), turns=st.integers(-3, 3))
@settings(max_examples=60, deadline=None)
def test_phase_periodicity(seed, k, turns):
    rng = np.random.default_rng(seed)
    psi = random_state(3, 2, rng)
    x = QuditProductAngles.random(2, 3, rng).to_vector()
    shifted = x.copy()
    phase_slots = [2, 3, 6, 7]
    shifted[phase_slots[k]] += turns * TWO_PI
    assert overlap_from_vector(psi, shifted) == pytest.approx(overlap_from_vector(psi, x), abs=1e-12)
    p = shifted.reshape(2, 2, 2)
    wrapped = QuditProductAngles.wrapped(p[:, 0], p[:, 1])
    assert overlap_probability(psi, wrapped) == pytest.approx(overlap_from_vector(psi, x), abs=1e-12)


def test_real_mode_sign_flip_invariance(rng):
    """Flipping the overall sign of a site factor maps to other in-range angles with equal overlap."""
    psi = random_state(3, 3, rng, real=True)
    for _ in range(20):
        ang = QuditProductAngles.random(3, 3, rng, real=True)
        f = ang.factors()
        f[1] *= -1
        other = QuditProductAngles.from_factors(f, real=True)
        assert overlap_probability(psi, other) == pytest.approx(overlap_probability(psi, ang), abs=1e-14)


@pytest.mark.parametrize("d, n", [(3, 2), (3, 3), (2, 3), (4, 2)])
def test_gradient_matches_finite_differences(d, n, rng):
    for _ in range(15):
        psi = random_state(d, n, rng)
        ang = QuditProductAngles(rng.uniform(0.05, HALF_PI - 0.05, (n, d - 1)),
                                 rng.uniform(0.05, TWO_PI - 0.05, (n, d - 1)))
        np.testing.assert_allclose(overlap_gradient(psi, ang), central_difference(psi, ang), atol=1e-6)


def test_gradient_real_mode_phase_entries_vanish(rng):
    for _ in range(20):
        psi = random_state(3, 2, rng, real=True)
        ang = QuditProductAngles.random(2, 3, rng, real=True)
        grad = overlap_gradient(psi, ang).reshape(2, 2, 2)
        assert np.all(np.abs(grad[:, 1]) < 1e-15)
        np.testing.assert_allclose(overlap_gradient(psi, ang), central_difference(psi, ang), atol=1e-6)


def test_gradient_vanishes_at_optimum(max_entangled, bell_like, rng):
    for psi in (max_entangled, bell_like, random_state(3, 2, rng), random_state(3, 3, rng)):
        rep = pmax_numeric(psi, OptimizerConfig(restarts=16))
        assert np.linalg.norm(overlap_gradient(psi, rep.best_angles)) < 1e-8


def test_product_state_overlap_with_basis():
    e = qutrit([0.0, HALF_PI], [0.0, HALF_PI])  # |3> x |2>
    np.testing.assert_allclose(qutrit_product_state(e).amplitudes, basis_state((3, 2), 3).amplitudes, atol=1e-15)


def test_factor_vectors_batched_shape(rng):
    f = factor_vectors(rng.uniform(size=(5, 4, 2)), rng.uniform(size=(5, 4, 2)))
    assert f.shape == (5, 4, 3)
    np.testing.assert_allclose(np.linalg.norm(f, axis=-1), 1, atol=1e-14)
