"""Injectivity conditions, certificates and counterexamples for Gabor phase retrieval.

Every check reads the zero pattern of an :class:`~gaborpr.tfcore.AmbiguityTable`
through its ``zero_tolerance``; nothing here recomputes support thresholds.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import check_hermitian, check_positive_int, check_signal
from .generators import is_prime
from .tfcore import _check_mask, full_mask, gabor_system

__all__ = [
    "UncertaintyConstant",
    "theta",
    "default_theta",
    "support_size",
    "uncertainty_sum",
    "SparsityProfile",
    "sparsity_profile",
    "FrameBounds",
    "frame_bounds",
    "ConditionReport",
    "check_full_condition",
    "check_nonvanishing_condition",
    "check_sparse_condition",
    "check_fourier_sparse_condition",
    "phaselift_apply",
    "negative_witness",
    "verify_kernel_witness",
]


@dataclass(frozen=True)
class UncertaintyConstant:
    """``theta`` with ``||f||_0 + ||fhat||_0 >= N - theta`` for every nonzero ``f``.

    For ``mode='meshulam'`` the bound only covers ``||f||_0 = k`` and
    ``printed_value`` keeps the alternative sign reading
    ``N - k + N/(d1 d2) (d1 + d2 - k)`` for reference; ``value`` is the one used.
    """

    n: int
    mode: str
    value: int
    k: int = None
    divisors: tuple = None
    printed_value: float = None

    def __int__(self):
        return self.value


def _divisors(n):
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def theta(n, mode="prime", k=None):
    """Uncertainty constant for dimension ``n``.

    Parameters
    ----------
    n : int
    mode : {'prime', 'general', 'meshulam'}
        ``prime`` gives -1 and needs prime ``n``. ``general`` gives
        ``n - ceil(2 sqrt(n))``. ``meshulam`` uses consecutive divisors
        ``d1 <= k <= d2`` of ``n`` and gives ``n - k - n/(d1 d2) (d1 + d2 - k)``.
    k : int, optional
        Sparsity, required for ``meshulam``.
    """
    n = check_positive_int(n, "n")
    if mode == "prime":
        if not is_prime(n):
            raise ValueError(f"mode 'prime' needs a prime n, got {n}")
        return UncertaintyConstant(n=n, mode=mode, value=-1)
    if mode == "general":
        # smallest integer m with m >= 2 sqrt(n)
        m = math.isqrt(4 * n - 1) + 1
        return UncertaintyConstant(n=n, mode=mode, value=n - m)
    if mode == "meshulam":
        if k is None:
            raise ValueError("mode 'meshulam' needs a sparsity k")
        k = check_positive_int(k, "k")
        if k > n:
            raise ValueError(f"k={k} exceeds n={n}")
        divs = _divisors(n)
        if n == 1:
            raise ValueError("mode 'meshulam' needs n >= 2")
        # largest divisor d1 <= k that has a successor; k == n falls in the last gap
        i = max(i for i, d in enumerate(divs[:-1]) if d <= k)
        d1, d2 = divs[i], divs[i + 1]
        fhat_min = n * (d1 + d2 - k) // (d1 * d2)
        if n * (d1 + d2 - k) % (d1 * d2):
            fhat_min += 1
        value = n - k - fhat_min
        printed = n - k + n / (d1 * d2) * (d1 + d2 - k)
        return UncertaintyConstant(n=n, mode=mode, value=value, k=k, divisors=(d1, d2),
                                   printed_value=printed)
    raise ValueError(f"unknown mode {mode!r}")


def default_theta(n):
    """Prime-mode constant for prime ``n``, general-mode otherwise."""
    return theta(n, "prime") if is_prime(n) else theta(n, "general")


def _theta_value(th):
    if isinstance(th, UncertaintyConstant):
        return th.value
    return int(th)


def support_size(f, rel_tol=1e-9):
    """Number of entries with ``|f| > rel_tol * max|f|``."""
    a = np.abs(np.asarray(f))
    top = a.max() if a.size else 0.0
    if top == 0.0:
        return 0
    return int(np.count_nonzero(a > rel_tol * top))


def uncertainty_sum(f, rel_tol=1e-9):
    """``||f||_0 + ||dft(f)||_0`` with relative zero thresholds."""
    f = check_signal(f)
    return support_size(f, rel_tol) + support_size(np.fft.fft(f), rel_tol)


@dataclass(frozen=True)
class SparsityProfile:
    """Per-row (``c_p``) and per-column counts of the ambiguity support."""

    row_counts: np.ndarray
    col_counts: np.ndarray
    tolerance: float

    @property
    def total(self):
        return int(self.row_counts.sum())


def sparsity_profile(table):
    supp = table.support
    return SparsityProfile(row_counts=supp.sum(axis=1), col_counts=supp.sum(axis=0),
                           tolerance=table.zero_tolerance)


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float

    def __iter__(self):
        return iter((self.lower, self.upper))


def frame_bounds(table):
    """``(N min|<g, g_lam>|^2, N max|<g, g_lam>|^2)`` for the rank-one system."""
    mags2 = table.magnitudes ** 2
    return FrameBounds(lower=float(table.n * mags2.min()), upper=float(table.n * mags2.max()))


@dataclass
class ConditionReport:
    """Outcome of one condition check with the data that backs it."""

    condition: str
    passed: bool
    tolerance: float
    min_magnitude: float = None
    argmin: tuple = None
    row_counts: list = None
    col_counts: list = None
    theta: int = None
    k: int = None
    k_hat: int = None
    required_A: int = None
    required_B: int = None
    frame_bounds: tuple = None
    message: str = ""
    witness: dict = field(default=None, repr=False)

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"

    def __bool__(self):
        return self.passed

    def to_dict(self):
        d = asdict(self)
        d.pop("passed")
        d = {"condition": d.pop("condition"), "verdict": self.verdict, **d}
        if d["argmin"] is not None:
            d["argmin"] = [int(v) for v in d["argmin"]]
        if d["frame_bounds"] is not None:
            d["frame_bounds"] = [float(v) for v in d["frame_bounds"]]
        if d["witness"] is not None:
            d["witness"] = {key: _jsonable(v) for key, v in d["witness"].items()}
        return d


def _jsonable(v):
    if isinstance(v, np.ndarray):
        if np.iscomplexobj(v):
            return {"re": v.real.tolist(), "im": v.imag.tolist()}
        return v.tolist()
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


def _first_zero(mags, tol):
    """Row-major first entry at or below ``tol``, else the global argmin."""
    zeros = np.argwhere(mags <= tol)
    if zeros.size:
        return tuple(int(v) for v in zeros[0])
    return tuple(int(v) for v in np.unravel_index(np.argmin(mags), mags.shape))


def check_full_condition(table):
    """Pass iff every ``<g, g_lam>`` exceeds the zero tolerance."""
    mags = table.magnitudes
    tol = table.zero_tolerance
    arg = _first_zero(mags, tol)
    passed = bool(np.all(mags > tol))
    msg = "" if passed else f"<g, g_(p,l)> vanishes at (p, l) = {arg}"
    return ConditionReport(condition="full", passed=passed, tolerance=tol,
                           min_magnitude=float(mags.min()), argmin=arg,
                           frame_bounds=tuple(frame_bounds(table)), message=msg)


def check_nonvanishing_condition(table):
    """Pass iff rows ``p = 0`` and ``p = 1`` of the table have no zero entry."""
    mags = table.magnitudes[:2] if table.n > 1 else table.magnitudes[:1]
    tol = table.zero_tolerance
    arg = _first_zero(mags, tol)
    passed = bool(np.all(mags > tol))
    msg = "" if passed else f"<g, g_(p,l)> vanishes at (p, l) = {arg}"
    return ConditionReport(condition="nonvanishing", passed=passed, tolerance=tol,
                           min_magnitude=float(mags.min()), argmin=arg, message=msg)


def _sparse_check(name, counts, other_counts, k, th, n, tol, rows):
    k = check_positive_int(k, "k")
    tv = _theta_value(th)
    k_hat = int(counts.max())
    lower = tv + 2 * k + 1
    bad = np.flatnonzero(counts < lower)
    passed = bad.size == 0
    req_sparse = min(n, max(1, tv + k_hat + 1))
    req_dense = min(n, max(1, tv + (2 * k) ** 2 - 2 * k + 2))
    if rows:
        req_a, req_b = req_sparse, req_dense
        label = "row p"
    else:
        req_a, req_b = req_dense, req_sparse
        label = "column l"
    msg = ""
    if not passed:
        i = int(bad[0])
        msg = f"{label}={i} has {int(counts[i])} nonzero entries, need at least {lower}"
    rep = ConditionReport(condition=name, passed=passed, tolerance=tol,
                          row_counts=(counts if rows else other_counts).tolist(),
                          col_counts=(other_counts if rows else counts).tolist(),
                          theta=tv, k=k, k_hat=k_hat, message=msg)
    if passed:
        rep.required_A, rep.required_B = req_a, req_b
    else:
        rep.argmin = (int(bad[0]), 0) if rows else (0, int(bad[0]))
    return rep


def check_sparse_condition(table, k, theta=None):
    """Row-sparsity condition for ``k``-sparse recovery from ``A x B``.

    Passes when every ``||c_p||_0 >= theta + 2k + 1``. On success the report
    carries ``k_hat = max_p ||c_p||_0`` and the mask sizes
    ``|A| >= theta + k_hat + 1`` and ``|B| >= theta + (2k)**2 - 2k + 2``,
    both capped at ``N`` (a complete index set needs no sparsity argument).
    """
    th = default_theta(table.n) if theta is None else theta
    prof = sparsity_profile(table)
    return _sparse_check("sparse", prof.row_counts, prof.col_counts, k, th, table.n,
                         table.zero_tolerance, rows=True)


def check_fourier_sparse_condition(table, k, theta=None):
    """Column counterpart of :func:`check_sparse_condition` for signals sparse in frequency.

    The roles of the two mask sizes swap: ``|A| >= theta + (2k)**2 - 2k + 2``
    and ``|B| >= theta + k_hat + 1``.
    """
    th = default_theta(table.n) if theta is None else theta
    prof = sparsity_profile(table)
    return _sparse_check("fourier_sparse", prof.col_counts, prof.row_counts, k, th, table.n,
                         table.zero_tolerance, rows=False)


def phaselift_apply(h, g, mask=None):
    """Evaluate ``<H, g_lam g_lam^*>_HS = <g_lam, H g_lam>`` on ``mask``.

    Returns a complex array aligned with the rows of ``mask`` (row-major
    ``Z_N x Z_N`` when omitted).
    """
    g = check_signal(g, name="generator")
    n = g.shape[0]
    h = check_hermitian(h, n, rtol=1e-10)
    idx = full_mask(n) if mask is None else _check_mask(mask, n)
    system = gabor_system(g)[idx[:, 0], idx[:, 1]]  # (m, n)
    return np.einsum("mi,ij,mj->m", system.conj(), h, system)


def negative_witness(kind, n, p_hat=None):
    """Rank-two Hermitian kernel candidates for generators with vanishing rows.

    ``short_window_h1``: ``e_0 e_{-p}^* + e_{-p} e_0^*``.
    ``modulation_h2``: ``e_0 e_0^* - e_1 e_1^*``.
    """
    n = check_positive_int(n, "n", minimum=2)
    h = np.zeros((n, n), dtype=np.complex128)
    if kind in ("short_window_h1", "h1"):
        if p_hat is None or p_hat % n == 0:
            raise ValueError("short_window_h1 needs a nonzero p_hat")
        m = (-p_hat) % n
        h[0, m] = h[m, 0] = 1.0
    elif kind in ("modulation_h2", "h2"):
        h[0, 0], h[1, 1] = 1.0, -1.0
    else:
        raise ValueError(f"unknown witness kind {kind!r}")
    return h


def _normalize_phase(v):
    i = int(np.argmax(np.abs(v)))
    if abs(v[i]) == 0:
        return v
    out = v * (abs(v[i]) / v[i])
    out[i] = abs(v[i])
    return out


def verify_kernel_witness(h, g, mask=None, support=None, rank_tol=1e-9, kernel_tol=1e-10):
    """Check that ``h`` certifies non-injectivity of the Gabor intensity map.

    ``h`` is confirmed when it has rank one or two, ``phaselift_apply``
    vanishes on ``mask`` relative to ``||h||``, and (if ``support`` is given)
    every entry outside ``support x support`` is negligible. The report's
    ``witness`` holds the two signals ``x = sqrt|l1| phi1`` and
    ``y = sqrt|l2| phi2`` built from the nonzero eigenpairs. When the two
    eigenvalues have opposite signs, ``x`` and ``y`` are measured identically;
    otherwise (or at rank one) ``x`` is measured like the zero signal and
    ``y`` is returned as zero.
    """
    from .recovery import phase_aligned_error

    h = check_hermitian(h, rtol=1e-10)
    g = check_signal(g, h.shape[0], name="generator")
    n = h.shape[0]
    hnorm = float(np.linalg.norm(h))
    if hnorm == 0.0:
        return ConditionReport(condition="kernel_witness", passed=False, tolerance=kernel_tol,
                               message="zero matrix has rank 0")
    evals, evecs = np.linalg.eigh(h)
    keep = np.flatnonzero(np.abs(evals) > rank_tol * np.abs(evals).max())
    rank = int(keep.size)
    applied = phaselift_apply(h, g, mask)
    residual = float(np.abs(applied).max())
    reasons = []
    if rank not in (1, 2):
        reasons.append(f"rank {rank} is not 1 or 2")
    if residual >= kernel_tol * hnorm:
        reasons.append(f"max |A(H)| = {residual:.3e} is not below {kernel_tol:g} ||H||")
    if support is not None:
        supp = np.zeros(n, dtype=bool)
        supp[np.mod(np.asarray(list(support), dtype=np.int64), n)] = True
        off = ~np.outer(supp, supp)
        leak = float(np.abs(h[off]).max()) if off.any() else 0.0
        if leak >= 1e-12 * hnorm:
            reasons.append(f"entry of size {leak:.3e} outside the declared support box")
    order = keep[np.argsort(-evals[keep], kind="stable")]
    x = np.sqrt(abs(evals[order[0]])) * _normalize_phase(evecs[:, order[0]])
    y = np.zeros(n, dtype=np.complex128)
    opposite = rank == 2 and evals[order[0]] * evals[order[1]] < 0
    if opposite:
        y = np.sqrt(abs(evals[order[1]])) * _normalize_phase(evecs[:, order[1]])
    system = gabor_system(g).reshape(n * n, n) if mask is None else \
        gabor_system(g)[_check_mask(mask, n)[:, 0], _check_mask(mask, n)[:, 1]]
    mx = np.abs(system.conj() @ x) ** 2
    my = np.abs(system.conj() @ y) ** 2
    witness = {
        "rank": rank,
        "eigenvalues": evals[order],
        "x": x,
        "y": y,
        "pair": "equal_measurements" if opposite else "zero_measurement",
        "max_intensity_difference": float(np.abs(mx - my).max()),
        "pair_error": float(phase_aligned_error(x, y)),
        "kernel_residual": residual,
    }
    passed = not reasons
    return ConditionReport(condition="kernel_witness", passed=passed, tolerance=kernel_tol,
                           min_magnitude=residual, message="; ".join(reasons), witness=witness)
