"""Seeded experiment runner, mask builders, signal models and audits.

Every trial owns its own ``numpy.random.Generator`` seeded from
``(master_seed, k, trial)`` through :class:`numpy.random.SeedSequence`, so
trials can run in any order (or in parallel) and still produce the same
numbers.
"""

import csv
import json
import math
import platform
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._validation import check_index_set, check_positive_int
from .generators import RNG_ALGORITHM, GeneratorSpec, complex_normal, make_rng
from .injectivity import (
    check_fourier_sparse_condition,
    check_full_condition,
    check_nonvanishing_condition,
    check_sparse_condition,
    default_theta,
    frame_bounds,
    sparsity_profile,
)
from .recovery import MaskPair, SolverOptions, phase_aligned_error, sgpr, sgpr_fourier_sparse
from .tfcore import ambiguity_table, measure_intensities

__all__ = [
    "SIGNAL_KINDS",
    "SignalModel",
    "random_sparse_signal",
    "MaskSpec",
    "build_mask",
    "trial_seed",
    "ExperimentConfig",
    "TrialRecord",
    "SummaryRow",
    "ExperimentResult",
    "run_experiment",
    "write_results",
    "audit_report",
]

SIGNAL_KINDS = ("dense_random", "sparse_random", "sparse_block", "nonvanishing_random",
                "fourier_sparse_random")
_SPARSE_KINDS = ("sparse_random", "sparse_block", "fourier_sparse_random")

CSV_HEADER = ("k", "trial", "seed", "error", "success", "ms")


def _fmt(v):
    """Scientific notation with 9 significant digits."""
    return f"{float(v):.8e}"


# --------------------------------------------------------------------------
# signals


@dataclass(frozen=True)
class SignalModel:
    """Random signal family.

    ``k`` is the sparsity for the sparse kinds and ignored otherwise.
    """

    kind: str
    n: int
    k: int = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal model {self.kind!r}; expected one of {SIGNAL_KINDS}")
        check_positive_int(self.n, "n")
        if self.kind in _SPARSE_KINDS:
            if self.k is None:
                raise ValueError(f"signal model {self.kind!r} needs a sparsity k")
            k = int(self.k)
            if k < 1 or k > self.n:
                raise ValueError(f"sparsity must satisfy 1 <= k <= n, got k={self.k}, n={self.n}")


def random_sparse_signal(model, rng=None):
    """Draw one signal from ``model``.

    Nonzero values are CN(0, 1). ``sparse_random`` places ``k`` of them on a
    uniformly random support, ``sparse_block`` on ``k`` consecutive indices
    (mod N) starting at a uniform offset, and ``fourier_sparse_random``
    returns ``sqrt(N) idft(z)`` for such a ``z`` with random support.

    Parameters
    ----------
    model : SignalModel
    rng : numpy.random.Generator, optional
        Overrides ``model.seed``.
    """
    rng = make_rng(model.seed) if rng is None else rng
    n = model.n
    if model.kind == "dense_random":
        return complex_normal(rng, n)
    if model.kind == "nonvanishing_random":
        x = complex_normal(rng, n)
        # a draw of exactly zero has probability zero, but the contract is strict
        while np.any(np.abs(x) == 0):
            bad = np.abs(x) == 0
            x[bad] = complex_normal(rng, int(bad.sum()))
        return x
    k = int(model.k)
    if model.kind == "sparse_block":
        start = int(rng.integers(n))
        support = (start + np.arange(k)) % n
    else:
        support = rng.choice(n, size=k, replace=False)
    vals = complex_normal(rng, k)
    while np.any(vals == 0):
        vals = complex_normal(rng, k)
    x = np.zeros(n, dtype=np.complex128)
    x[support] = vals
    if model.kind == "fourier_sparse_random":
        return np.sqrt(n) * np.fft.ifft(x)
    return x


# --------------------------------------------------------------------------
# masks


def _check_fraction(f, name):
    f = float(f)
    if not 0.0 < f <= 1.0:
        raise ValueError(f"{name} must lie in (0, 1], got {f}")
    return f


@dataclass(frozen=True)
class MaskSpec:
    """How to choose ``A x B``.

    Modes
    -----
    full
        ``A = B = Z_N``.
    fig1a
        ``A = Z_N``, ``B`` a random subset of size ``floor(fraction_b N)``.
    fig1b
        Both sets random, sizes ``floor(fraction_a N)`` and ``floor(fraction_b N)``.
    sizes
        Both sets random with the given sizes ``size_a`` and ``size_b``.
    explicit
        Fixed ``A`` and ``B``.
    """

    mode: str = "full"
    fraction_a: float = None
    fraction_b: float = None
    size_a: int = None
    size_b: int = None
    a_set: tuple = None
    b_set: tuple = None

    def __post_init__(self):
        needs = {
            "full": (),
            "fig1a": ("fraction_b",),
            "fig1b": ("fraction_a", "fraction_b"),
            "sizes": ("size_a", "size_b"),
            "explicit": ("a_set", "b_set"),
        }
        if self.mode not in needs:
            raise ValueError(f"unknown mask mode {self.mode!r}; expected one of {tuple(needs)}")
        for name in needs[self.mode]:
            if getattr(self, name) is None:
                raise ValueError(f"mask mode {self.mode!r} needs {name}")
        for name in ("fraction_a", "fraction_b"):
            if getattr(self, name) is not None:
                _check_fraction(getattr(self, name), name)
        for name in ("a_set", "b_set"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))

    @property
    def random(self):
        return self.mode in ("fig1a", "fig1b", "sizes")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        aliases = {"A": "a_set", "B": "b_set"}
        d = {aliases.get(key, key): val for key, val in d.items()}
        return cls(**d)

    def to_dict(self):
        return {key: (list(val) if isinstance(val, tuple) else val)
                for key, val in asdict(self).items() if val is not None}


def _floor_size(fraction, n, name):
    size = math.floor(fraction * n)
    if size < 1:
        raise ValueError(f"{name} = {fraction} gives an empty set for n={n}")
    return size


def _sample(rng, n, size, name):
    size = int(size)
    if size < 1 or size > n:
        raise ValueError(f"{name} must lie in [1, {n}], got {size}")
    if size == n:
        return np.arange(n)
    return np.sort(rng.choice(n, size=size, replace=False))


def build_mask(n, spec, seed=None):
    """Materialize a :class:`MaskSpec` as a :class:`MaskPair`.

    Parameters
    ----------
    n : int
    spec : MaskSpec or dict
    seed : int or numpy.random.Generator, optional
        Randomness for the sampled modes. ``A`` is drawn before ``B``.
    """
    n = check_positive_int(n, "n")
    if isinstance(spec, dict):
        spec = MaskSpec.from_dict(spec)
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    if spec.mode == "full":
        return MaskPair.full(n)
    if spec.mode == "explicit":
        return MaskPair(check_index_set(list(spec.a_set), n, "A"),
                        check_index_set(list(spec.b_set), n, "B"), n)
    if spec.mode == "fig1a":
        a = np.arange(n)
        b = _sample(rng, n, _floor_size(spec.fraction_b, n, "fraction_b"), "|B|")
        return MaskPair(a, b, n)
    if spec.mode == "fig1b":
        sa = _floor_size(spec.fraction_a, n, "fraction_a")
        sb = _floor_size(spec.fraction_b, n, "fraction_b")
    else:
        sa, sb = spec.size_a, spec.size_b
    a = _sample(rng, n, sa, "|A|")
    b = _sample(rng, n, sb, "|B|")
    return MaskPair(a, b, n)


# --------------------------------------------------------------------------
# experiments


def trial_seed(master_seed, k, trial):
    """32-bit seed for one trial, mixed from ``(master_seed, k, trial)``.

    Uses ``SeedSequence([master_seed, k, trial]).generate_state(1)[0]``.
    """
    ss = np.random.SeedSequence([int(master_seed), int(k), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep over sparsities ``ks`` with ``trials`` seeded trials each.

    ``timing=False`` leaves the ``ms`` column empty, which makes the CSV
    byte-identical across runs.
    """

    generator: GeneratorSpec
    signal_model: str
    ks: tuple
    trials: int
    mask: MaskSpec = field(default_factory=MaskSpec)
    n: int = None
    seed: int = 0
    threshold: float = 1e-2
    solver: SolverOptions = field(default_factory=SolverOptions)
    output: str = None
    timing: bool = True
    n_jobs: int = 1

    def __post_init__(self):
        if isinstance(self.generator, dict):
            object.__setattr__(self, "generator", GeneratorSpec.from_dict(self.generator))
        if isinstance(self.mask, dict):
            object.__setattr__(self, "mask", MaskSpec.from_dict(self.mask))
        if isinstance(self.solver, dict):
            object.__setattr__(self, "solver", SolverOptions(**self.solver))
        if self.signal_model not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal model {self.signal_model!r}")
        ks = (self.ks,) if np.isscalar(self.ks) else self.ks
        ks = tuple(int(k) for k in ks)
        if not ks:
            raise ValueError("sparsity list must be non-empty")
        if len(set(ks)) != len(ks):
            raise ValueError("sparsity list has duplicates")
        object.__setattr__(self, "ks", ks)
        check_positive_int(self.trials, "trials")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.n_jobs != -1:
            check_positive_int(self.n_jobs, "n_jobs")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "sparsities" in d and "ks" not in d:
            d["ks"] = d.pop("sparsities")
        if "trials" not in d and "T" in d:
            d["trials"] = d.pop("T")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown config keys {unknown}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        path = Path(path)
        cfg = cls.from_dict(json.loads(path.read_text()))
        if cfg.generator.kind == "file":
            p = Path(cfg.generator.params["path"])
            if not p.is_absolute():
                params = dict(cfg.generator.params, path=str(path.parent / p))
                cfg = cls(**{**cfg.__dict__, "generator": GeneratorSpec("file", params)})
        return cfg

    def to_dict(self):
        return {
            "n": self.n,
            "generator": self.generator.to_dict(),
            "mask": self.mask.to_dict(),
            "signal_model": self.signal_model,
            "ks": list(self.ks),
            "trials": self.trials,
            "seed": self.seed,
            "threshold": self.threshold,
            "solver": asdict(self.solver),
            "output": self.output,
            "timing": self.timing,
            "n_jobs": self.n_jobs,
        }


@dataclass(frozen=True)
class TrialRecord:
    k: int
    trial: int
    seed: int
    error: float
    success: bool
    ms: float
    paths: dict = field(default_factory=dict)
    reason: str = None

    def csv_row(self, timing=True):
        ms = _fmt(self.ms) if timing else ""
        return [str(self.k), str(self.trial), str(self.seed), _fmt(self.error),
                "1" if self.success else "0", ms]


@dataclass(frozen=True)
class SummaryRow:
    """Per-sparsity aggregate; ``rate`` is an exact fraction of ``trials``."""

    k: int
    trials: int
    successes: int
    rate: Fraction
    mean_error: float
    mean_ms: float
    failures: int

    def to_dict(self):
        return {"k": self.k, "trials": self.trials, "successes": self.successes,
                "rate": float(self.rate), "mean_error": self.mean_error,
                "mean_ms": self.mean_ms, "failures": self.failures}


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    summary: list

    def rate(self, k):
        for row in self.summary:
            if row.k == k:
                return float(row.rate)
        raise KeyError(k)


def _run_trial(config, g, table, n, k, t):
    seed = trial_seed(config.seed, k, t)
    rng = make_rng(seed)
    start = time.perf_counter()
    try:
        model = SignalModel(config.signal_model, n, k, seed)
        x = random_sparse_signal(model, rng)
        mask = build_mask(n, config.mask, rng)
        meas = measure_intensities(x, g, mask.indices())
        if config.signal_model == "fourier_sparse_random":
            xhat, state = sgpr_fourier_sparse(g, meas, mask, config.solver)
        else:
            xhat, state = sgpr(g, meas, mask, config.solver, table=table)
        err = phase_aligned_error(x, xhat)
        if not np.isfinite(err):
            raise FloatingPointError("non-finite reconstruction error")
        ms = 1e3 * (time.perf_counter() - start)
        return TrialRecord(k, t, seed, err, err < config.threshold, ms, state.paths)
    except Exception as exc:  # recorded, never aborts the sweep
        ms = 1e3 * (time.perf_counter() - start)
        return TrialRecord(k, t, seed, float("inf"), False, ms, {}, f"{type(exc).__name__}: {exc}")


def _summarize(k, recs):
    errs = np.array([r.error for r in recs])
    finite = errs[np.isfinite(errs)]
    s = sum(r.success for r in recs)
    return SummaryRow(
        k=k, trials=len(recs), successes=s, rate=Fraction(s, len(recs)),
        mean_error=float(finite.mean()) if finite.size else float("inf"),
        mean_ms=float(np.mean([r.ms for r in recs])),
        failures=sum(r.reason is not None for r in recs),
    )


def run_experiment(config):
    """Run every ``(k, trial)`` pair of ``config``.

    Each trial draws its signal and mask from its own seed, measures,
    reconstructs and scores with :func:`phase_aligned_error`. Exceptions
    inside a trial become failed records with ``error = inf`` and a reason.

    Returns
    -------
    ExperimentResult
        Records in ``(k, trial)`` order of the config, and one summary row per ``k``.
    """
    g = config.generator.build()
    n = g.shape[0]
    if config.n is not None and config.n != n:
        raise ValueError(f"config n={config.n} but the generator has length {n}")
    table = ambiguity_table(g, config.solver.zero_tolerance)
    jobs = [(k, t) for k in config.ks for t in range(config.trials)]
    if config.n_jobs == 1:
        records = [_run_trial(config, g, table, n, k, t) for k, t in jobs]
    else:
        from joblib import Parallel, delayed

        records = Parallel(n_jobs=config.n_jobs)(
            delayed(_run_trial)(config, g, table, n, k, t) for k, t in jobs)
    summary = [_summarize(k, [r for r in records if r.k == k]) for k in config.ks]
    return ExperimentResult(config, records, summary)


def _versions():
    from importlib.metadata import PackageNotFoundError, version

    out = {"python": platform.python_version(), "numpy": np.__version__}
    try:
        out["gaborpr"] = version("gaborpr")
    except PackageNotFoundError:
        out["gaborpr"] = "unknown"
    return out


def meta_path(csv_path):
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def write_results(result, path):
    """Write the trial CSV and its ``<stem>.meta.json`` companion.

    Returns the path of the metadata file.
    """
    cfg = result.config
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in result.records:
            writer.writerow(rec.csv_row(cfg.timing))
    meta = {
        "config": cfg.to_dict(),
        "decisions": {
            "mask_rounding": "floor",
            "mask_resampling": "per_trial" if cfg.mask.random else "fixed",
            "seed_mixing": "numpy.random.SeedSequence([master_seed, k, trial]).generate_state(1)[0]",
            "success": f"error < {cfg.threshold!r}",
            "error": "min over |c| = 1 of ||x - c xhat||^2 / ||x||^2",
            "float_format": "%.8e",
            "timing": cfg.timing,
        },
        "rng": RNG_ALGORITHM,
        "versions": _versions(),
        "summary": [row.to_dict() for row in result.summary],
        "failures": [{"k": r.k, "trial": r.trial, "seed": r.seed, "reason": r.reason}
                     for r in result.records if r.reason is not None],
    }
    if not cfg.timing:
        for row in meta["summary"]:
            row.pop("mean_ms")
    mp = meta_path(path)
    mp.write_text(json.dumps(meta, indent=2, default=str) + "\n")
    return mp


# --------------------------------------------------------------------------
# audits


def audit_report(spec, k_list=(1,), zero_tolerance=None):
    """Injectivity audit of a generator as a JSON-ready dict.

    The uncertainty constant is the prime one when ``N`` is prime and the
    general one otherwise.
    """
    if isinstance(spec, dict):
        spec = GeneratorSpec.from_dict(spec)
    g = spec.build() if isinstance(spec, GeneratorSpec) else np.asarray(spec, dtype=complex)
    table = ambiguity_table(g, zero_tolerance)
    n = table.n
    th = default_theta(n)
    prof = sparsity_profile(table)
    lower, upper = frame_bounds(table)
    report = {
        "generator": spec.to_dict() if isinstance(spec, GeneratorSpec) else None,
        "n": n,
        "zero_tolerance": table.zero_tolerance,
        "theta": {"mode": th.mode, "value": int(th)},
        "profile": {"row_counts": prof.row_counts.tolist(), "col_counts": prof.col_counts.tolist(),
                    "zero_count": int(n * n - table.support.sum())},
        "frame_bounds": {"lower": float(lower), "upper": float(upper)},
        "full": check_full_condition(table).to_dict(),
        "nonvanishing": check_nonvanishing_condition(table).to_dict(),
        "sparse": {},
        "fourier_sparse": {},
    }
    for k in k_list:
        k = check_positive_int(k, "k")
        report["sparse"][str(k)] = check_sparse_condition(table, k, th).to_dict()
        report["fourier_sparse"][str(k)] = check_fourier_sparse_condition(table, k, th).to_dict()
    return report
