import numpy as np
import pytest

from groverian.entropy import schmidt_coefficients, von_neumann_entropy
from groverian.errors import NotBipartite
from groverian.qudit import basis_state, random_state

from .test_measure import apply_local, random_unitary


def test_entropy_examples(max_entangled, bell_like, product_12):
    assert von_neumann_entropy(max_entangled) == pytest.approx(1.0, abs=1e-12)
    assert von_neumann_entropy(bell_like) == pytest.approx(0.63093, abs=1e-5)
    assert von_neumann_entropy(bell_like) == pytest.approx(np.log(2) / np.log(3), abs=1e-12)
    assert von_neumann_entropy(product_12) == 0.0


def test_entropy_log_base(bell_like):
    assert von_neumann_entropy(bell_like, log_base=2) == pytest.approx(1.0, abs=1e-12)
    assert von_neumann_entropy(bell_like, log_base=np.e) == pytest.approx(np.log(2), abs=1e-12)


def test_schmidt_coefficients_examples(max_entangled, bell_like, product_12):
    np.testing.assert_allclose(schmidt_coefficients(max_entangled), [1 / 3] * 3, atol=1e-14)
    np.testing.assert_allclose(schmidt_coefficients(bell_like), [0.5, 0.5, 0], atol=1e-14)
    np.testing.assert_allclose(schmidt_coefficients(product_12), [1, 0, 0], atol=1e-14)


def test_not_bipartite(rng):
    with pytest.raises(NotBipartite):
        von_neumann_entropy(random_state(3, 3, rng))
    with pytest.raises(NotBipartite):
        schmidt_coefficients(random_state(3, 1, rng))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_entropy_properties(d, rng):
    for _ in range(50):
        psi = random_state(d, 2, rng)
        s1, s2 = von_neumann_entropy(psi, 1), von_neumann_entropy(psi, 2)
        assert s1 == pytest.approx(s2, abs=1e-10)
        assert 0 <= s1 <= 1 + 1e-12
        lam = schmidt_coefficients(psi)
        assert lam.sum() == pytest.approx(1, abs=1e-10)
        assert np.all(np.diff(lam) <= 1e-15)
        moved = apply_local(psi, [random_unitary(d, rng) for _ in range(2)])
        assert von_neumann_entropy(moved) == pytest.approx(s1, abs=1e-9)


def test_entropy_zero_iff_rank_one(rng):
    for labels in ((1, 1), (2, 3), (3, 2)):
        assert von_neumann_entropy(basis_state(labels, 3)) == 0.0
    for _ in range(20):
        assert von_neumann_entropy(random_state(3, 2, rng)) > 1e-9


def test_no_nan_near_zero_eigenvalues():
    a = np.zeros(9)
    a[0] = np.sqrt(1 - 1e-26)
    a[4] = 1e-13
    from groverian.qudit import make_state

    s = von_neumann_entropy(make_state(3, 2, a))
    assert np.isfinite(s) and s >= 0
