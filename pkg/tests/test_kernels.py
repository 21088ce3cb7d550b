import numpy as np
import pytest

from bellud import BellLikeFamily, _kernels_py, kernels
from bellud.optimizer import DEFAULT_POWERS

from conftest import random_state, random_unitary

compiled = pytest.importorskip("bellud._kernels")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("dim", [4, 5, 6, 8])
def test_event_probabilities_parity(dim):
    u = random_unitary(dim, dim).matrix
    coeffs = np.stack([random_state(k).coeffs for k in range(4)])
    np.testing.assert_allclose(compiled.event_probabilities(u, coeffs),
                               _kernels_py.event_probabilities(u, coeffs), atol=1e-14)


def test_mesh_parity():
    x = np.random.default_rng(0).uniform(0, 6, 12)
    coeffs = np.stack([random_state(k).coeffs for k in range(4)])
    np.testing.assert_allclose(compiled.mesh_matrix(x), _kernels_py.mesh_matrix(x), atol=1e-14)
    np.testing.assert_allclose(compiled.mesh_event_probabilities(x, coeffs),
                               _kernels_py.mesh_event_probabilities(x, coeffs), atol=1e-14)
    priors = np.full(4, 0.25)
    for k in (1.0, 64.0):
        assert compiled.surrogate(x, coeffs, priors, k) == pytest.approx(
            _kernels_py.surrogate(x, coeffs, priors, k), rel=1e-12)


def test_anneal_parity_short():
    # a few stages only; long runs drift apart through rounding
    x = np.random.default_rng(1).uniform(0, 6, 12)
    coeffs = np.stack([s.coeffs for s in BellLikeFamily.from_angles(0.3, 0.6).states()])
    priors = np.full(4, 0.25)
    a = compiled.anneal(x, coeffs, priors, DEFAULT_POWERS[:1], 1e-7, 1e-15, 200)
    b = _kernels_py.anneal(x, coeffs, priors, DEFAULT_POWERS[:1], 1e-7, 1e-15, 200)
    np.testing.assert_allclose(np.asarray(a[0]), np.asarray(b[0]), atol=1e-9)
    assert list(a[1]) == list(b[1])
