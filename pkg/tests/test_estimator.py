import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import cn
from gaborpr.estimator import GaborPhaseRetrieval
from gaborpr.recovery import phase_aligned_error


def test_params_and_clone():
    est = GaborPhaseRetrieval(generator="ds7", eig_method="jacobi")
    params = est.get_params()
    assert params["generator"] == "ds7" and params["eig_method"] == "jacobi"
    twin = clone(est.set_params(bp_tolerance=1e-7))
    assert twin.get_params()["bp_tolerance"] == 1e-7


def test_round_trip_full(rng):
    est = GaborPhaseRetrieval(generator="ds7")
    X = cn(rng, (3, 7))
    Y = est.fit_transform(X)
    assert Y.shape == (3, 49) and Y.dtype == np.float64
    Xhat = est.inverse_transform(Y)
    assert all(phase_aligned_error(x, xh) < 1e-20 for x, xh in zip(X, Xhat))
    assert est.score(X) > -1e-20
    assert est.conditions_["full"]
    assert len(est.states_) == 3


def test_partial_mask_sparse(rng):
    b = np.sort(rng.choice(67, 33, replace=False))
    est = GaborPhaseRetrieval(generator={"kind": "quadratic_ds", "q": 67}, b_set=b, sparsity=2).fit()
    x = np.zeros((1, 67), dtype=complex)
    x[0, [5, 40]] = [1, 1j]
    assert est.transform(x).shape == (1, 67 * 33)
    assert est.score(x) > -1e-6
    assert est.conditions_["sparse"]


def test_fourier_sparse(rng):
    g = np.r_[np.ones(4), np.zeros(27)]
    est = GaborPhaseRetrieval(generator=g, fourier_sparse=True).fit()
    z = np.zeros(31, dtype=complex)
    z[[1, 7]] = [2, -1j]
    x = np.sqrt(31) * np.fft.ifft(z)
    assert phase_aligned_error(x, est.inverse_transform(est.transform(x))[0]) < 1e-8


def test_validation(rng):
    est = GaborPhaseRetrieval(generator="ds7")
    with pytest.raises(NotFittedError):
        est.transform(cn(rng, (1, 7)))
    est.fit()
    with pytest.raises(ValueError, match="features"):
        est.transform(cn(rng, (2, 6)))
    with pytest.raises(ValueError):
        est.transform(np.full((1, 7), np.nan))
    with pytest.raises(TypeError):
        est.inverse_transform(np.ones((1, 49), dtype=complex))
    with pytest.raises(ValueError):
        GaborPhaseRetrieval(generator="ds7").fit(cn(rng, (2, 5)))
    with pytest.raises(ValueError):
        GaborPhaseRetrieval(generator="ds7", eig_method="qr").fit()
