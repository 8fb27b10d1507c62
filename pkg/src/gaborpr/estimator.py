"""scikit-learn style wrapper around measurement and SGPR recovery."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_signal, check_signal_matrix
from .generators import GeneratorSpec, load_spec
from .injectivity import (
    check_fourier_sparse_condition,
    check_full_condition,
    check_nonvanishing_condition,
    check_sparse_condition,
)
from .recovery import MaskPair, SolverOptions, phase_aligned_error, sgpr, sgpr_fourier_sparse
from .tfcore import MeasurementSet, ambiguity_table, measure_intensities

__all__ = ["GaborPhaseRetrieval"]


class GaborPhaseRetrieval(TransformerMixin, BaseEstimator):
    """Gabor intensity measurement as a transformer, SGPR as its inverse.

    ``transform`` maps signals to intensities ``|<x, g_(q,j)>|^2`` on
    ``A x B`` (``q`` outer, ``j`` inner); ``inverse_transform`` recovers
    signals up to a global phase.

    Parameters
    ----------
    generator : array-like, dict, GeneratorSpec or str
        The window ``g``, a generator spec, or a catalog name.
    a_set, b_set : array-like of int, optional
        Translation and modulation sets; ``None`` means all of ``Z_N``.
    fourier_sparse : bool, default=False
        Recover through the frequency-domain problem.
    sparsity : int, optional
        If given, ``fit`` also checks the matching sparse condition.
    bp_max_iterations, bp_tolerance, bp_penalty : basis pursuit controls
    eig_method : {'eigh', 'jacobi'}
    zero_tolerance : float, optional
        Ambiguity support threshold.

    Attributes
    ----------
    generator_ : ndarray of shape (n_features,)
    table_ : AmbiguityTable
    mask_ : MaskPair
    n_features_in_ : int
    conditions_ : dict of ConditionReport
    """

    def __init__(self, generator="qds67", a_set=None, b_set=None, fourier_sparse=False,
                 sparsity=None, bp_max_iterations=2000, bp_tolerance=1e-6, bp_penalty=1.0,
                 eig_method="eigh", zero_tolerance=None):
        self.generator = generator
        self.a_set = a_set
        self.b_set = b_set
        self.fourier_sparse = fourier_sparse
        self.sparsity = sparsity
        self.bp_max_iterations = bp_max_iterations
        self.bp_tolerance = bp_tolerance
        self.bp_penalty = bp_penalty
        self.eig_method = eig_method
        self.zero_tolerance = zero_tolerance

    def _build_generator(self):
        g = self.generator
        if isinstance(g, str):
            g = load_spec(g)
        if isinstance(g, dict):
            g = GeneratorSpec.from_dict(g)
        if isinstance(g, GeneratorSpec):
            g = g.build()
        return check_signal(g, name="generator")

    def fit(self, X=None, y=None):
        """Build the generator, its ambiguity table and the mask.

        Nothing is learned from ``X``; when given, only its width is checked.
        """
        g = self._build_generator()
        n = g.shape[0]
        if X is not None:
            check_signal_matrix(X, n)
        a = np.arange(n) if self.a_set is None else self.a_set
        b = np.arange(n) if self.b_set is None else self.b_set
        self.options_ = SolverOptions(bp_max_iterations=self.bp_max_iterations,
                                      bp_tolerance=self.bp_tolerance, bp_penalty=self.bp_penalty,
                                      eig_method=self.eig_method, zero_tolerance=self.zero_tolerance)
        self.generator_ = g
        self.mask_ = MaskPair(a, b, n)
        self.table_ = ambiguity_table(g, self.zero_tolerance)
        self.n_features_in_ = n
        self.conditions_ = {
            "full": check_full_condition(self.table_),
            "nonvanishing": check_nonvanishing_condition(self.table_),
        }
        if self.sparsity is not None:
            check = check_fourier_sparse_condition if self.fourier_sparse else check_sparse_condition
            self.conditions_["sparse"] = check(self.table_, self.sparsity)
        return self

    def transform(self, X):
        """Intensities of each row of ``X``, shape ``(n_samples, |A| |B|)``."""
        check_is_fitted(self, "table_")
        X = check_signal_matrix(X, self.n_features_in_)
        idx = self.mask_.indices()
        return np.stack([measure_intensities(x, self.generator_, idx).values for x in X])

    def inverse_transform(self, Y):
        """Recover one signal per row of intensities ``Y``."""
        check_is_fitted(self, "table_")
        idx = self.mask_.indices()
        Y = check_signal_matrix(Y, idx.shape[0], name="Y", dtype=np.float64)
        n = self.n_features_in_
        out = np.empty((Y.shape[0], n), dtype=np.complex128)
        self.states_ = []
        for i, row in enumerate(Y):
            meas = MeasurementSet(n=n, indices=idx, values=row)
            if self.fourier_sparse:
                out[i], state = sgpr_fourier_sparse(self.generator_, meas, self.mask_, self.options_)
            else:
                out[i], state = sgpr(self.generator_, meas, self.mask_, self.options_,
                                     table=self.table_)
            self.states_.append(state)
        return out

    def score(self, X, y=None):
        """Negative mean phase-aligned round-trip error; higher is better."""
        X = check_signal_matrix(X, getattr(self, "n_features_in_", None))
        Xhat = self.inverse_transform(self.transform(X))
        return -float(np.mean([phase_aligned_error(x, xh) for x, xh in zip(X, Xhat)]))
