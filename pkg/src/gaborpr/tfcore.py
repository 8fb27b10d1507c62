"""Discrete time-frequency primitives on Z_N.

Conventions
-----------
* inner product ``<x, y> = sum(conj(x) * y)`` (conjugate-linear in the first slot)
* forward transform ``xhat(j) = sum_n x(n) w^(-nj)`` with ``w = exp(2j*pi/N)``
* inverse transform ``xcheck(j) = (1/N) sum_n x(n) w^(nj)``
* time-frequency shift ``Pi_(p,l) = M_l T_p``, i.e.
  ``(Pi_(p,l) x)(n) = w^(l n) x(n - p)``

These match ``numpy.fft.fft`` / ``numpy.fft.ifft`` exactly, which back the
transforms below.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_index_set, check_positive_int, check_signal

__all__ = [
    "DftPlan",
    "dft",
    "idft",
    "tf_index",
    "tf_shift",
    "tf_shift_matrix",
    "gabor_system",
    "AmbiguityTable",
    "ambiguity_table",
    "MeasurementSet",
    "full_mask",
    "product_mask",
    "measure_intensities",
]


@dataclass(frozen=True)
class DftPlan:
    """Root of unity and scaling for length-``n`` transforms."""

    n: int
    forward_sign: int = -1
    inverse_scale: float = field(init=False)
    omega: complex = field(init=False)

    def __post_init__(self):
        check_positive_int(self.n, "n")
        object.__setattr__(self, "omega", np.exp(2j * np.pi / self.n))
        object.__setattr__(self, "inverse_scale", 1.0 / self.n)

    def forward(self, x):
        return dft(check_signal(x, self.n))

    def inverse(self, x):
        return idft(check_signal(x, self.n))

    def matrix(self):
        """Dense forward transform matrix ``F[j, n] = w^(-nj)``."""
        idx = np.arange(self.n)
        return self.omega ** (-np.outer(idx, idx) % self.n)


def dft(x):
    """Unnormalized forward transform, ``xhat(j) = sum_n x(n) w^(-nj)``."""
    return np.fft.fft(check_signal(x))


def idft(x):
    """Inverse transform with ``1/N`` scaling."""
    return np.fft.ifft(check_signal(x))


def tf_index(p, l, n):
    return int(p) % n, int(l) % n


def tf_shift(x, lam):
    """Apply ``M_l T_p`` to ``x`` for ``lam = (p, l)``."""
    x = check_signal(x)
    n = x.shape[0]
    p, l = tf_index(lam[0], lam[1], n)
    phases = np.exp(2j * np.pi * l * np.arange(n) / n)
    return phases * np.roll(x, p)


def tf_shift_matrix(lam, n):
    """Dense matrix of ``Pi_lam`` acting on length-``n`` column vectors."""
    n = check_positive_int(n, "n")
    p, l = tf_index(lam[0], lam[1], n)
    out = np.zeros((n, n), dtype=np.complex128)
    rows = np.arange(n)
    out[rows, (rows - p) % n] = np.exp(2j * np.pi * l * rows / n)
    return out


def gabor_system(g):
    """All ``N**2`` vectors ``g_(p,l)`` stacked as an ``(N, N, N)`` array.

    ``out[p, l]`` is ``M_l T_p g``.
    """
    g = check_signal(g, name="generator")
    n = g.shape[0]
    idx = np.arange(n)
    shifted = np.stack([np.roll(g, p) for p in range(n)])  # (p, n)
    mod = np.exp(2j * np.pi * np.outer(idx, idx) / n)  # (l, n)
    return shifted[:, None, :] * mod[None, :, :]


@dataclass(frozen=True, eq=False)
class AmbiguityTable:
    """Correlations ``values[p, l] = <g, g_(p,l)>`` of a generator.

    ``zero_tolerance`` is the magnitude at or below which an entry counts as
    zero in every support decision made downstream.
    """

    generator: np.ndarray
    values: np.ndarray
    zero_tolerance: float

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def energy(self):
        """``||g||**2``, the (0, 0) entry."""
        return float(np.vdot(self.generator, self.generator).real)

    @property
    def magnitudes(self):
        return np.abs(self.values)

    @property
    def support(self):
        """Boolean grid of entries treated as nonzero."""
        return self.magnitudes > self.zero_tolerance

    def row(self, p):
        """The sequence ``c_p`` obtained by letting the modulation run."""
        return self.values[p % self.n]

    def column(self, l):
        """The sequence obtained by letting the translation run at fixed ``l``."""
        return self.values[:, l % self.n]

    def __repr__(self):
        nz = int(self.support.sum())
        return f"AmbiguityTable(n={self.n}, nonzero={nz}/{self.n ** 2}, zero_tolerance={self.zero_tolerance:.3g})"


def ambiguity_table(g, zero_tolerance=None):
    """Compute ``<g, M_l T_p g>`` for all ``(p, l)`` in ``Z_N x Z_N``.

    Parameters
    ----------
    g : array-like
        Nonzero generator of length ``N``.
    zero_tolerance : float, optional
        Support threshold on ``|value|``. Defaults to ``1e-9 * ||g||**2``.

    Returns
    -------
    AmbiguityTable
    """
    g = check_signal(g, name="generator")
    energy = float(np.vdot(g, g).real)
    if energy == 0.0:
        raise ValueError("generator must be nonzero")
    if zero_tolerance is None:
        zero_tolerance = 1e-9 * energy
    if zero_tolerance < 0:
        raise ValueError("zero_tolerance must be nonnegative")
    n = g.shape[0]
    # row p: sum_n conj(g(n)) g(n - p) w^(l n) = N * ifft(conj(g) * roll(g, p))[l]
    prods = np.stack([g.conj() * np.roll(g, p) for p in range(n)])
    values = n * np.fft.ifft(prods, axis=1)
    values.setflags(write=False)
    g = g.copy()
    g.setflags(write=False)
    return AmbiguityTable(generator=g, values=values, zero_tolerance=float(zero_tolerance))


def full_mask(n):
    """Every index pair of ``Z_N x Z_N`` in row-major order."""
    q, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.stack([q.ravel(), j.ravel()], axis=1)


def product_mask(a_set, b_set, n):
    """Index pairs ``A x B`` in row-major order (``q`` outer, ``j`` inner)."""
    a = check_index_set(a_set, n, "translation set")
    b = check_index_set(b_set, n, "modulation set")
    q, j = np.meshgrid(a, b, indexing="ij")
    return np.stack([q.ravel(), j.ravel()], axis=1)


def _check_mask(mask, n):
    arr = np.asarray(mask)
    if arr.size == 0:
        raise ValueError("mask must be non-empty")
    arr = np.atleast_2d(arr)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("mask must be a sequence of (q, j) pairs")
    if not np.issubdtype(arr.dtype, np.integer):
        raise TypeError("mask entries must be integers")
    arr = np.mod(arr.astype(np.int64), n)
    keys = arr[:, 0] * n + arr[:, 1]
    if np.unique(keys).size != keys.size:
        raise ValueError("mask entries must be distinct")
    return arr


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Raw intensities ``|<x, g_(q,j)>|**2`` on a set of index pairs.

    Values are stored without the factor ``N``; the recovery stage applies it.
    """

    n: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = _check_mask(self.indices, self.n)
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if vals.shape[0] != idx.shape[0]:
            raise ValueError("one value per mask entry is required")
        if not np.all(np.isfinite(vals)):
            raise ValueError("measurement values must be finite")
        if np.any(vals < -1e-12):
            raise ValueError("measurement values must be nonnegative")
        idx.setflags(write=False)
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.shape[0]

    def as_dict(self):
        return {(int(q), int(j)): float(v) for (q, j), v in zip(self.indices, self.values)}

    def product_sets(self):
        """Return ``(A, B)`` if the indices form a full product ``A x B``."""
        a = np.unique(self.indices[:, 0])
        b = np.unique(self.indices[:, 1])
        if a.size * b.size != len(self):
            raise ValueError("measurement indices do not form a product set A x B")
        return a, b

    def grid(self, a_set, b_set):
        """Values arranged as an ``|A| x |B|`` array; every pair must be present."""
        lookup = np.full((self.n, self.n), np.nan)
        lookup[self.indices[:, 0], self.indices[:, 1]] = self.values
        out = lookup[np.ix_(np.asarray(a_set), np.asarray(b_set))]
        if np.any(np.isnan(out)):
            raise ValueError("measurements do not cover the requested mask A x B")
        return out


def measure_intensities(x, g, mask=None):
    """Gabor intensity measurements of ``x`` with generator ``g``.

    Parameters
    ----------
    x, g : array-like
        Signal and generator of equal length ``N``.
    mask : sequence of (q, j), optional
        Index pairs to measure; all ``N**2`` when omitted.

    Returns
    -------
    MeasurementSet
    """
    g = check_signal(g, name="generator")
    n = g.shape[0]
    x = check_signal(x, name="signal")
    if x.shape[0] != n:
        raise ValueError(f"dimension mismatch: signal has length {x.shape[0]}, generator {n}")
    idx = full_mask(n) if mask is None else _check_mask(mask, n)
    # <x, g_(q,j)> = sum_n conj(x(n)) g(n - q) w^(j n) = N * ifft(conj(x) * roll(g, q))[j]
    qs = np.unique(idx[:, 0])
    rows = np.stack([x.conj() * np.roll(g, q) for q in qs])
    coeffs = n * np.fft.ifft(rows, axis=1)
    pos = np.searchsorted(qs, idx[:, 0])
    vals = np.abs(coeffs[pos, idx[:, 1]]) ** 2
    return MeasurementSet(n=n, indices=idx, values=vals)
