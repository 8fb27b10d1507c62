"""Simple Gabor phase retrieval (SGPR).

The intensities ``b(q, j) = N |<x, g_(q,j)>|^2`` are unwound by three
Fourier inversions into the cyclic diagonals ("bands") of the lift
``H = x x^*``::

    dft(V^q)(j)       = b(q, j)                     j in B   (stage 1)
    N idft(w^p)(q)    = V^q(p)                      q in A   (stage 2)
    dft(band_p)(l)    = w^p(l) / <g, g_(p,l)>       l in L_p (stage 3)

with ``band_p(i) = H[i, i - p]`` and ``L_p`` the support of row ``p`` of the
ambiguity table. A stage whose index set is complete is inverted exactly with
the FFT; otherwise it is solved by basis pursuit. The estimate is the scaled
leading eigenvector of the reassembled ``H``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_hermitian, check_index_set, check_signal
from .tfcore import MeasurementSet, ambiguity_table

__all__ = [
    "SolverOptions",
    "MaskPair",
    "RecoveryState",
    "bp_partial_fourier",
    "basis_pursuit",
    "lift_from_measurements",
    "sgpr",
    "sgpr_fourier_sparse",
    "fourier_sparse_problem",
    "assemble_hermitian",
    "extract_bands",
    "leading_eigenpair",
    "jacobi_eigh",
    "phase_aligned_error",
]


@dataclass(frozen=True)
class SolverOptions:
    """Iteration controls for basis pursuit and the eigensolver.

    ``bp_tolerance`` bounds the relative primal and dual ADMM residuals;
    ``eig_method`` is ``'eigh'`` (LAPACK) or ``'jacobi'`` (cyclic Jacobi,
    stopping once the off-diagonal mass is below ``eig_tolerance ||H||``).
    ``zero_tolerance`` overrides the ambiguity support threshold.
    """

    bp_max_iterations: int = 2000
    bp_tolerance: float = 1e-6
    bp_penalty: float = 1.0
    bp_polish: bool = True
    eig_tolerance: float = 1e-12
    eig_method: str = "eigh"
    zero_tolerance: float = None

    def __post_init__(self):
        if self.bp_max_iterations < 1:
            raise ValueError("bp_max_iterations must be positive")
        for name in ("bp_tolerance", "bp_penalty", "eig_tolerance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.eig_method not in ("eigh", "jacobi"):
            raise ValueError(f"unknown eig_method {self.eig_method!r}")
        if self.zero_tolerance is not None and self.zero_tolerance < 0:
            raise ValueError("zero_tolerance must be nonnegative")


@dataclass(frozen=True)
class MaskPair:
    """Translation set ``A`` and modulation set ``B``; measurements live on ``A x B``."""

    a_set: np.ndarray
    b_set: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "a_set", check_index_set(self.a_set, self.n, "translation set A"))
        object.__setattr__(self, "b_set", check_index_set(self.b_set, self.n, "modulation set B"))

    @classmethod
    def full(cls, n):
        return cls(np.arange(n), np.arange(n), n)

    @property
    def size(self):
        return self.a_set.size * self.b_set.size

    @property
    def is_full(self):
        return self.a_set.size == self.n and self.b_set.size == self.n

    def indices(self):
        q, j = np.meshgrid(self.a_set, self.b_set, indexing="ij")
        return np.stack([q.ravel(), j.ravel()], axis=1)


@dataclass
class RecoveryState:
    """Intermediate grids and per-stage diagnostics of one SGPR run.

    ``v_grid[q, p] = V^q(p)`` (NaN for ``q`` outside ``A``),
    ``w_grid[p, l] = w^p(l)``, ``h_hat_bands[p, l]`` (NaN off ``L_p``) and
    ``bands[p, i] = H[i, i - p]``.
    """

    v_grid: np.ndarray
    w_grid: np.ndarray
    h_hat_bands: np.ndarray
    bands: np.ndarray
    lifted: np.ndarray
    eigenvalue: float
    hermitian_defect: float
    stages: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    @property
    def paths(self):
        return {name: info["path"] for name, info in self.stages.items()}

    def to_dict(self, include_grids=False):
        d = {
            "eigenvalue": self.eigenvalue,
            "hermitian_defect": self.hermitian_defect,
            "stages": self.stages,
            "flags": list(self.flags),
        }
        if include_grids:
            for name in ("v_grid", "w_grid", "h_hat_bands", "bands", "lifted"):
                arr = getattr(self, name)
                d[name] = {"re": np.nan_to_num(arr.real).tolist(), "im": np.nan_to_num(arr.imag).tolist()}
        return d


# --------------------------------------------------------------------------
# basis pursuit


class _PartialFourier:
    """Rows ``rows`` of ``scale * F`` (forward) or ``scale * F^{-1}`` (inverse)."""

    def __init__(self, n, rows, direction, scale):
        if direction not in ("forward", "inverse"):
            raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
        self.n = n
        self.rows = rows
        self.direction = direction
        self.scale = complex(scale)
        if self.scale == 0:
            raise ValueError("scale must be nonzero")
        # distinct rows are orthogonal with squared norm gram
        self.gram = abs(self.scale) ** 2 * (n if direction == "forward" else 1.0 / n)

    def apply(self, z):
        t = np.fft.fft(z, axis=-1) if self.direction == "forward" else np.fft.ifft(z, axis=-1)
        return self.scale * t[..., self.rows]

    def adjoint(self, r):
        full = np.zeros(r.shape[:-1] + (self.n,), dtype=np.complex128)
        full[..., self.rows] = r
        if self.direction == "forward":
            return np.conj(self.scale) * self.n * np.fft.ifft(full, axis=-1)
        return np.conj(self.scale) / self.n * np.fft.fft(full, axis=-1)

    def project(self, v, y):
        return v - self.adjoint(self.apply(v) - y) / self.gram

    def least_norm(self, y):
        return self.adjoint(y) / self.gram

    def matrix(self, cols=None):
        idx = np.arange(self.n) if cols is None else np.asarray(cols)
        sign = -1 if self.direction == "forward" else 1
        mat = np.exp(sign * 2j * np.pi * np.outer(self.rows, idx) / self.n)
        if self.direction == "inverse":
            mat = mat / self.n
        return self.scale * mat


class _Dense:
    """Arbitrary constraint matrix; projection through the pseudo-inverse."""

    def __init__(self, mat):
        self.mat = np.asarray(mat, dtype=np.complex128)
        self.n = self.mat.shape[1]
        self.pinv = np.linalg.pinv(self.mat)

    def apply(self, z):
        return z @ self.mat.T

    def project(self, v, y):
        return v - (self.apply(v) - y) @ self.pinv.T

    def least_norm(self, y):
        return y @ self.pinv.T

    def matrix(self, cols=None):
        return self.mat if cols is None else self.mat[:, cols]


def _soft(v, t):
    mag = np.abs(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        shrink = np.where(mag > t, 1.0 - t / np.where(mag > 0, mag, 1.0), 0.0)
    return v * shrink


def _admm(op, y, options):
    """Batched ADMM for ``min ||z||_1 s.t. op(z) = y``; rows of ``y`` are problems."""
    y = np.atleast_2d(np.asarray(y, dtype=np.complex128))
    batch = y.shape[0]
    x0 = op.least_norm(y)
    scale = np.abs(x0).max(axis=1)
    out = np.zeros((batch, op.n), dtype=np.complex128)
    iters = np.zeros(batch, dtype=int)
    live = np.flatnonzero(scale > 0)
    if live.size == 0:
        return out, iters
    s = scale[live][:, None]
    yl = y[live] / s
    z = x0[live] / s
    u = np.zeros_like(z)
    x = z.copy()
    rho = options.bp_penalty
    tol = options.bp_tolerance
    active = np.arange(live.size)
    for it in range(1, options.bp_max_iterations + 1):
        za, ua = z[active], u[active]
        xa = op.project(za - ua, yl[active])
        zn = _soft(xa + ua, 1.0 / rho)
        ua = ua + xa - zn
        r = np.linalg.norm(xa - zn, axis=1)
        sd = rho * np.linalg.norm(zn - za, axis=1)
        eps_pri = tol * np.maximum(np.linalg.norm(xa, axis=1), np.linalg.norm(zn, axis=1)) + 1e-14
        eps_dual = tol * rho * np.linalg.norm(ua, axis=1) + 1e-14
        x[active], z[active], u[active] = xa, zn, ua
        iters[live[active]] = it
        done = (r <= eps_pri) & (sd <= eps_dual)
        active = active[~done]
        if active.size == 0:
            break
    out[live] = x * s
    return out, iters


def _polish(op, y, z, rel=1e-6):
    """Re-fit each solution by least squares on a few candidate supports.

    Candidates are the dominant support of the ADMM iterate and its ``m``
    largest entries (``m`` constraints). A refit replaces the iterate only if
    it satisfies the constraints to round-off and its l1 norm does not exceed
    the iterate's by more than ``rel``; the smallest such norm wins.
    """
    y = np.atleast_2d(y)
    out = z.copy()
    m = y.shape[1]
    for i in range(z.shape[0]):
        mag = np.abs(z[i])
        top = mag.max()
        if top == 0:
            continue
        dominant = np.flatnonzero(mag > 1e-4 * top)
        largest = np.sort(np.argsort(-mag, kind="stable")[:m])
        best = np.abs(z[i]).sum() * (1 + rel)
        ynorm = max(np.linalg.norm(y[i]), 1e-300)
        for supp in (dominant, largest):
            if supp.size > m:
                continue
            mat = op.matrix(supp)
            coef, *_ = np.linalg.lstsq(mat, y[i], rcond=None)
            if np.linalg.norm(mat @ coef - y[i]) > 1e-9 * ynorm:
                continue
            l1 = np.abs(coef).sum()
            if l1 <= best:
                best = l1
                out[i] = 0
                out[i, supp] = coef
    return out


def basis_pursuit(mat, y, options=None):
    """``min ||z||_1`` subject to ``mat @ z = y`` for a dense constraint matrix.

    ``y`` may be 2-D with one problem per row. A full column rank system has
    a single feasible point, which is returned directly.
    """
    options = options or SolverOptions()
    op = _Dense(mat)
    y2 = np.atleast_2d(np.asarray(y, dtype=np.complex128))
    if np.linalg.matrix_rank(op.mat) == op.n:
        z = op.least_norm(y2)
        return (z if np.ndim(y) == 2 else z[0]), {"iterations": 0}
    z, iters = _admm(op, y2, options)
    if options.bp_polish:
        z = _polish(op, y2, z)
    return (z if np.ndim(y) == 2 else z[0]), {"iterations": int(iters.max())}


def bp_partial_fourier(y, rows, n, direction="forward", scale=1.0, options=None, return_info=False):
    """Sparsest-in-l1 vector matching selected rows of a scaled DFT or inverse DFT.

    Solves ``min ||z||_1`` subject to ``scale * T(z)[rows] = y`` where ``T`` is
    :func:`~gaborpr.tfcore.dft` (``direction='forward'``) or
    :func:`~gaborpr.tfcore.idft`. With a complete row set the exact inverse
    transform is returned without iterating.

    Parameters
    ----------
    y : array-like, shape (m,) or (batch, m)
        Constraint values in the order of ``rows``.
    rows : sequence of int
        Distinct row indices in ``Z_n``.
    """
    options = options or SolverOptions()
    rows_arr = np.asarray(list(rows), dtype=np.int64)
    if rows_arr.size == 0:
        raise ValueError("rows must be non-empty")
    if np.unique(np.mod(rows_arr, n)).size != rows_arr.size:
        raise ValueError("rows must be distinct modulo n")
    rows_arr = np.mod(rows_arr, n)
    if rows_arr.size > n:
        raise ValueError("more rows than unknowns")
    y2 = np.atleast_2d(np.asarray(y, dtype=np.complex128))
    if y2.shape[1] != rows_arr.size:
        raise ValueError("one value per row is required")
    op = _PartialFourier(n, rows_arr, direction, scale)
    if rows_arr.size == n:
        full = np.zeros((y2.shape[0], n), dtype=np.complex128)
        full[:, rows_arr] = y2 / op.scale
        z = np.fft.ifft(full, axis=1) if direction == "forward" else np.fft.fft(full, axis=1)
        info = {"path": "exact-fft", "iterations": 0}
    else:
        z, iters = _admm(op, y2, options)
        if options.bp_polish:
            z = _polish(op, y2, z)
        info = {"path": "basis-pursuit", "iterations": int(iters.max())}
    resid = np.linalg.norm(op.apply(z) - y2, axis=1) / np.maximum(np.linalg.norm(y2, axis=1), 1e-300)
    info["residual"] = float(resid.max())
    z = z if np.ndim(y) == 2 else z[0]
    return (z, info) if return_info else z


# --------------------------------------------------------------------------
# bands and the lifted matrix


def extract_bands(h):
    """``bands[p, i] = H[i, i - p]``."""
    h = np.asarray(h)
    n = h.shape[0]
    i = np.arange(n)
    return np.stack([h[i, (i - p) % n] for p in range(n)])


def assemble_hermitian(bands, max_defect=1e-6, return_defect=False):
    """Rebuild ``H`` from its bands and symmetrize it as ``(H + H^*) / 2``.

    Raises if the relative Hermitian defect ``||H - H^*|| / ||H||`` of the
    raw assembly exceeds ``max_defect`` (pass ``None`` to skip the check).
    """
    bands = np.asarray(bands, dtype=np.complex128)
    if bands.ndim != 2 or bands.shape[0] != bands.shape[1]:
        raise ValueError("need N bands of length N")
    n = bands.shape[0]
    h = np.zeros((n, n), dtype=np.complex128)
    i = np.arange(n)
    for p in range(n):
        h[i, (i - p) % n] = bands[p]
    norm = np.linalg.norm(h)
    defect = float(np.linalg.norm(h - h.conj().T) / norm) if norm > 0 else 0.0
    if max_defect is not None and defect > max_defect:
        raise ValueError(f"bands are inconsistent with a Hermitian matrix (defect {defect:.3e})")
    h = 0.5 * (h + h.conj().T)
    return (h, defect) if return_defect else h


# --------------------------------------------------------------------------
# eigensolvers


def jacobi_eigh(h, tol=1e-12, max_sweeps=100):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` in ascending order, eigenvectors
    as columns. Pairs are swept in row-major order ``(0,1), (0,2), ...``;
    iteration stops once the off-diagonal Frobenius mass is at most
    ``tol * ||H||``.
    """
    a = check_hermitian(h, rtol=1e-10).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if scale == 0:
        return np.zeros(n), v
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.linalg.norm(a) ** 2 - np.linalg.norm(np.diag(a)) ** 2, 0.0))
        if off <= tol * scale:
            break
        for p, q in pairs:
            apq = a[p, q]
            mag = abs(apq)
            if mag <= 1e-300 or mag < 1e-18 * scale:
                continue
            app, aqq = a[p, p].real, a[q, q].real
            tau = (aqq - app) / (2.0 * mag)
            t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            e = apq / mag
            rot = np.array([[c, s], [-s * np.conj(e), c * np.conj(e)]])
            cols = [p, q]
            a[:, cols] = a[:, cols] @ rot
            a[cols, :] = rot.conj().T @ a[cols, :]
            a[p, q] = a[q, p] = 0.0
            a[p, p], a[q, q] = a[p, p].real, a[q, q].real
            v[:, cols] = v[:, cols] @ rot
    evals = np.diag(a).real
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]


def _normalize_phase(v):
    i = int(np.argmax(np.abs(v)))
    if v[i] == 0:
        return v
    out = v * (abs(v[i]) / v[i])
    out[i] = abs(v[i])
    return out


def leading_eigenpair(h, method="eigh", tol=1e-12):
    """Algebraically largest eigenvalue and a unit eigenvector of ``h``.

    For a repeated top eigenvalue the vector is the normalized projection of
    ``e_i`` onto the eigenspace for the lowest ``i`` whose projection is
    at least half the largest one, which does not depend on the solver's
    choice of basis. The eigenvector is rotated so that its largest-magnitude
    entry is real and positive.
    """
    h = check_hermitian(h, rtol=1e-10)
    if method == "eigh":
        evals, evecs = np.linalg.eigh(h)
    elif method == "jacobi":
        evals, evecs = jacobi_eigh(h, tol=tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    top = evals.max()
    slack = 1e-10 * max(np.abs(evals).max(), 1e-300)
    tied = np.flatnonzero(evals >= top - slack)
    if tied.size == 1:
        v = evecs[:, tied[0]]
    else:
        basis = evecs[:, tied]
        weight = np.sum(np.abs(basis) ** 2, axis=1)
        i = int(np.flatnonzero(weight >= 0.5 * weight.max())[0])
        v = basis @ basis[i].conj()
        v = v / np.linalg.norm(v)
    lam = float(np.real(np.vdot(v, h @ v)))
    return lam, _normalize_phase(v)


def phase_aligned_error(x, y):
    """``min_{|c|=1} ||x - c y||^2 / ||x||^2``."""
    x = check_signal(x, name="reference")
    y = check_signal(y, x.shape[0], name="estimate")
    nx = np.vdot(x, x).real
    if nx == 0:
        raise ValueError("reference signal must be nonzero")
    inner = np.vdot(y, x)
    c = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.linalg.norm(x - c * y) ** 2 / nx)


# --------------------------------------------------------------------------
# SGPR


def _stage_info(paths, iterations, residuals, solves):
    uniq = sorted(set(paths))
    if not uniq:
        path = "empty"
    elif len(uniq) == 1:
        path = uniq[0]
    else:
        path = "mixed"
    return {
        "path": path,
        "iterations": int(max(iterations, default=0)),
        "residual": float(max(residuals, default=0.0)),
        "solves": int(solves),
    }


def _group_by_support(support):
    groups = {}
    for p, row in enumerate(support):
        groups.setdefault(row.tobytes(), []).append(p)
    return [(np.flatnonzero(support[ps[0]]), ps) for ps in groups.values()]


def lift_from_measurements(b, table, mask, options=None):
    """Stages 1-3 of SGPR: recover the bands of the lift from ``b = N * intensities``.

    Parameters
    ----------
    b : ndarray, shape (|A|, |B|)
        Scaled measurements on ``A x B``; may be complex (e.g. the HS products
        of an arbitrary Hermitian matrix).
    table : AmbiguityTable
    mask : MaskPair

    Returns
    -------
    RecoveryState
        With ``lifted``/``eigenvalue`` left unset (zeros / NaN).
    """
    options = options or SolverOptions()
    n = table.n
    a_set, b_set = mask.a_set, mask.b_set
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (a_set.size, b_set.size):
        raise ValueError(f"measurement grid has shape {b.shape}, mask needs {(a_set.size, b_set.size)}")
    stages = {}

    # stage 1: dft(V^q)(j) = b(q, j) for j in B, every q in A shares the row set
    v_rows, info = bp_partial_fourier(b, b_set, n, "forward", 1.0, options, return_info=True)
    v_grid = np.full((n, n), np.nan + 0j)
    v_grid[a_set] = v_rows
    stages["stage1"] = _stage_info([info["path"]], [info["iterations"]], [info["residual"]], a_set.size)

    # stage 2: N idft(w^p)(q) = V^q(p) for q in A, unknowns restricted to supp(c_p)
    support = table.support
    w_grid = np.zeros((n, n), dtype=np.complex128)
    rhs = v_rows.T  # (p, q in A)
    paths, its, res = [], [], []
    if a_set.size == n:
        w_grid = np.fft.fft(rhs, axis=1) / n
        paths.append("exact-fft")
    else:
        for cols, ps in _group_by_support(support):
            if cols.size == 0:
                continue
            if cols.size == n:
                z, info = bp_partial_fourier(rhs[ps], a_set, n, "inverse", float(n), options,
                                             return_info=True)
                w_grid[ps] = z
            else:
                op = _PartialFourier(n, a_set, "inverse", float(n))
                z, binfo = basis_pursuit(op.matrix(cols), rhs[ps], options)
                w_grid[np.ix_(ps, cols)] = z
                r = np.linalg.norm(z @ op.matrix(cols).T - rhs[ps], axis=1)
                info = {"path": "basis-pursuit", "iterations": binfo["iterations"],
                        "residual": float((r / np.maximum(np.linalg.norm(rhs[ps], axis=1), 1e-300)).max())}
            paths.append(info["path"])
            its.append(info["iterations"])
            res.append(info["residual"])
    stages["stage2"] = _stage_info(paths, its, res, n)

    # stage 3: divide by the ambiguity on its support and invert each band
    h_hat = np.full((n, n), np.nan + 0j)
    h_hat[support] = w_grid[support] / table.values[support]
    bands = np.zeros((n, n), dtype=np.complex128)
    paths, its, res = [], [], []
    empty = []
    for cols, ps in _group_by_support(support):
        if cols.size == 0:
            empty.extend(ps)
            continue
        z, info = bp_partial_fourier(h_hat[np.ix_(ps, cols)], cols, n, "forward", 1.0, options,
                                     return_info=True)
        bands[ps] = z
        paths.append(info["path"])
        its.append(info["iterations"])
        res.append(info["residual"])
    stages["stage3"] = _stage_info(paths, its, res, n - len(empty))
    flags = []
    if empty:
        stages["stage3"]["undetermined_bands"] = sorted(int(p) for p in empty)
        flags.append("undetermined_bands")
    return RecoveryState(v_grid=v_grid, w_grid=w_grid, h_hat_bands=h_hat, bands=bands,
                         lifted=np.zeros((n, n), dtype=np.complex128), eigenvalue=float("nan"),
                         hermitian_defect=float("nan"), stages=stages, flags=flags)


def _coerce_mask(mask, measurements, n):
    if mask is None:
        a, b = measurements.product_sets()
        return MaskPair(a, b, n)
    if isinstance(mask, MaskPair):
        if mask.n != n:
            raise ValueError("mask dimension does not match the generator")
        return mask
    a, b = mask
    return MaskPair(a, b, n)


def sgpr(g, measurements, mask=None, options=None, table=None):
    """Recover a signal from Gabor intensities on ``A x B``.

    Parameters
    ----------
    g : array-like
        Generator of length ``N``.
    measurements : MeasurementSet
        Raw intensities ``|<x, g_(q,j)>|^2``; must cover ``A x B``.
    mask : MaskPair or (A, B), optional
        Defaults to the product set spanned by the measurement indices.
    options : SolverOptions, optional
    table : AmbiguityTable, optional
        Precomputed table of ``g``.

    Returns
    -------
    x0 : ndarray
        Estimate of the signal up to a global phase.
    state : RecoveryState
    """
    options = options or SolverOptions()
    g = check_signal(g, name="generator")
    n = g.shape[0]
    if not isinstance(measurements, MeasurementSet):
        raise TypeError("measurements must be a MeasurementSet")
    if measurements.n != n:
        raise ValueError(f"measurements have dimension {measurements.n}, generator {n}")
    mask = _coerce_mask(mask, measurements, n)
    if table is None:
        table = ambiguity_table(g, options.zero_tolerance)
    b = n * measurements.grid(mask.a_set, mask.b_set)
    state = lift_from_measurements(b, table, mask, options)
    h, defect = assemble_hermitian(state.bands, max_defect=None, return_defect=True)
    lam, v = leading_eigenpair(h, options.eig_method, options.eig_tolerance)
    state.lifted = h
    state.hermitian_defect = defect
    state.eigenvalue = lam
    if lam <= 0:
        state.flags.append("nonpositive_leading_eigenvalue")
        return np.zeros(n, dtype=np.complex128), state
    return np.sqrt(lam) * v, state


def fourier_sparse_problem(g, measurements, mask=None):
    """Rewrite a problem for ``x`` as one for ``z = dft(x) / sqrt(N)``.

    Measuring ``x`` with ``g`` at ``(q, j)`` equals measuring ``z`` with
    ``dft(g) / sqrt(N)`` at ``(j, -q)``, so ``A x B`` becomes ``B x (-A)``.

    Returns ``(g_z, measurements_z, mask_z)``.
    """
    g = check_signal(g, name="generator")
    n = g.shape[0]
    mask = _coerce_mask(mask, measurements, n)
    gz = np.fft.fft(g) / np.sqrt(n)
    idx = measurements.indices
    zidx = np.stack([idx[:, 1], (-idx[:, 0]) % n], axis=1)
    mz = MeasurementSet(n=n, indices=zidx, values=measurements.values)
    return gz, mz, MaskPair(mask.b_set, (-mask.a_set) % n, n)


def sgpr_fourier_sparse(g, measurements, mask=None, options=None):
    """SGPR for signals that are sparse in frequency.

    Solves the equivalent problem for ``z = dft(x) / sqrt(N)`` (see
    :func:`fourier_sparse_problem`) and maps the estimate back with
    ``x0 = sqrt(N) idft(z0)``.
    """
    gz, mz, maskz = fourier_sparse_problem(g, measurements, mask)
    z0, state = sgpr(gz, mz, maskz, options)
    n = z0.shape[0]
    return np.sqrt(n) * np.fft.ifft(z0), state
