"""Generator constructions: difference sets, random, windowed and Alltop.

All seeded constructions use ``numpy.random.Generator(PCG64(seed))`` created
per call, so a fixed seed reproduces the output bit for bit.
"""

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_index_set, check_positive_int
from .tfcore import idft

RNG_ALGORITHM = "numpy.random.PCG64"

__all__ = [
    "RNG_ALGORITHM",
    "DifferenceSetParams",
    "InvalidDifferenceSet",
    "characteristic_vector",
    "validate_difference_set",
    "quadratic_difference_set",
    "quartic_difference_set",
    "random_gaussian_generator",
    "fourier_window_generator",
    "spatial_window_generator",
    "alltop_generator",
    "GeneratorSpec",
    "CATALOG",
    "is_prime",
]


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def complex_normal(rng, size):
    """CN(0, 1) draws: real and imaginary parts each N(0, 1/2)."""
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) / np.sqrt(2.0)


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class DifferenceSetParams:
    """A validated ``(N, K, nu)`` difference set."""

    n: int
    k_set: int
    nu: int
    elements: tuple
    degenerate: bool = False

    def __post_init__(self):
        if self.k_set * (self.k_set - 1) != self.nu * (self.n - 1):
            raise ValueError("K(K-1) = nu(N-1) violated")


@dataclass(frozen=True)
class InvalidDifferenceSet:
    """Outcome of a failed validation, naming one offending residue."""

    n: int
    elements: tuple
    residue: int
    count: int
    expected: int
    counts: dict = field(repr=False)

    def __bool__(self):
        return False

    @property
    def message(self):
        return (f"residue {self.residue} appears {self.count} times as a difference, "
                f"expected {self.expected}")


def characteristic_vector(n, elements):
    """Indicator vector of ``elements`` (reduced mod ``n``) in ``C^n``."""
    n = check_positive_int(n, "n")
    elements = list(elements)
    if len(elements) == 0:
        raise ValueError("element set must be non-empty")
    idx = check_index_set(elements, n, "element set")
    out = np.zeros(n, dtype=np.complex128)
    out[idx] = 1.0
    return out


def difference_counts(n, elements):
    counts = Counter({r: 0 for r in range(1, n)})
    for a in elements:
        for b in elements:
            if a != b:
                counts[(a - b) % n] += 1
    return dict(counts)


def validate_difference_set(n, elements):
    """Exhaustively count pairwise differences of ``elements`` mod ``n``.

    Returns
    -------
    DifferenceSetParams or InvalidDifferenceSet
        The parameters when every nonzero residue occurs equally often,
        otherwise a falsy report naming the first residue whose count
        disagrees with the count of residue 1.
    """
    n = check_positive_int(n, "n", minimum=2)
    elems = tuple(int(e) for e in check_index_set(list(elements), n, "element set"))
    counts = difference_counts(n, elems)
    k = len(elems)
    expected = counts[1]
    for r in range(2, n):
        if counts[r] != expected:
            return InvalidDifferenceSet(n=n, elements=elems, residue=r, count=counts[r],
                                        expected=expected, counts=counts)
    return DifferenceSetParams(n=n, k_set=k, nu=expected, elements=elems, degenerate=expected == 0)


def _power_residues(p, power):
    return sorted({pow(t, power, p) for t in range(1, p)})


def quadratic_difference_set(q):
    """Nonzero squares mod a prime ``q = 3 (mod 4)``.

    Returns ``(params, chi)`` with ``K = (q-1)/2`` and ``nu = (q-3)/4``.
    """
    q = check_positive_int(q, "q", minimum=2)
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    if q % 4 != 3:
        raise ValueError(f"q={q} is not congruent to 3 mod 4")
    elems = _power_residues(q, 2)
    params = validate_difference_set(q, elems)
    if not params or params.k_set != (q - 1) // 2 or params.nu != (q - 3) // 4:
        raise RuntimeError(f"quadratic residues mod {q} failed validation")
    return params, characteristic_vector(q, elems)


def quartic_difference_set(p):
    """Nonzero fourth powers mod a prime ``p = 4a**2 + 1`` with ``a`` odd.

    Returns ``(params, chi)`` with ``K = (p-1)/4`` and ``nu = (p-5)/16``.
    ``p = 5`` gives the degenerate ``(5, 1, 0)`` set, flagged as such.
    """
    p = check_positive_int(p, "p", minimum=2)
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    a2, rem = divmod(p - 1, 4)
    a = math.isqrt(a2) if rem == 0 else -1
    if rem != 0 or a * a != a2 or a % 2 == 0:
        raise ValueError(f"p={p} is not of the form 4a^2+1 with a odd")
    elems = _power_residues(p, 4)
    params = validate_difference_set(p, elems)
    if not params or params.k_set != (p - 1) // 4 or params.nu != (p - 5) // 16:
        raise RuntimeError(f"quartic residues mod {p} failed validation")
    return params, characteristic_vector(p, elems)


def random_gaussian_generator(n, seed):
    """Complex standard normal vector of length ``n``."""
    n = check_positive_int(n, "n")
    return complex_normal(make_rng(seed), n)


def fourier_window_generator(n, k):
    """``g = idft(chi_[0, k])``: a window of length ``k+1`` in frequency.

    Requires ``2k + 1 < n``.
    """
    n = check_positive_int(n, "n")
    k = check_positive_int(k, "k", minimum=0)
    if 2 * k + 1 >= n:
        raise ValueError(f"need 2k+1 < n, got k={k}, n={n}")
    v = np.zeros(n, dtype=np.complex128)
    v[: k + 1] = 1.0
    return idft(v)


def spatial_window_generator(n, length, seed=None):
    """Window supported on ``[0, length-1]``.

    With ``seed=None`` the window is all ones; otherwise its entries are
    seeded CN(0, 1) draws (a generic window).
    """
    n = check_positive_int(n, "n")
    length = check_positive_int(length, "length")
    if length > n:
        raise ValueError(f"window length {length} exceeds n={n}")
    g = np.zeros(n, dtype=np.complex128)
    if seed is None:
        g[:length] = 1.0
    else:
        g[:length] = complex_normal(make_rng(seed), length)
    return g


def alltop_generator(n):
    """Unit-norm Alltop sequence ``w^(m**3) / sqrt(n)`` for prime ``n >= 5``."""
    n = check_positive_int(n, "n")
    if n < 5 or not is_prime(n):
        raise ValueError(f"Alltop sequence requires a prime n >= 5, got {n}")
    m = np.arange(n)
    return np.exp(2j * np.pi * (m ** 3 % n) / n) / np.sqrt(n)


# Named specs shipped with the CLI.
CATALOG = {
    "ds7": {"kind": "characteristic", "n": 7, "elements": [1, 2, 4]},
    **{f"qds{q}": {"kind": "quadratic_ds", "q": q} for q in (7, 11, 19, 23, 31, 43, 47, 59, 67)},
    "quartic37": {"kind": "quartic_ds", "p": 37},
}

_KINDS = ("characteristic", "quadratic_ds", "quartic_ds", "random_gaussian",
          "fourier_window", "spatial_window", "alltop", "file")


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative handle for a generator, as used in configs and the CLI."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {_KINDS}")
        required = {
            "characteristic": ("n", "elements"),
            "quadratic_ds": ("q",),
            "quartic_ds": ("p",),
            "random_gaussian": ("n", "seed"),
            "fourier_window": ("n", "k"),
            "spatial_window": ("n", "length"),
            "alltop": ("n",),
            "file": ("path",),
        }[self.kind]
        missing = [key for key in required if key not in self.params]
        if missing:
            raise ValueError(f"generator kind {self.kind!r} is missing {missing}")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "name" in d and "kind" not in d:
            return cls.from_name(d["name"])
        kind = d.pop("kind", None)
        if kind is None:
            raise ValueError("generator spec needs a 'kind'")
        return cls(kind=kind, params=d)

    @classmethod
    def from_name(cls, name):
        if name not in CATALOG:
            raise ValueError(f"unknown catalog entry {name!r}; available: {sorted(CATALOG)}")
        return cls.from_dict(CATALOG[name])

    def to_dict(self):
        return {"kind": self.kind, **self.params}

    def build(self, base_dir=None):
        """Construct the generator signal."""
        p = self.params
        if self.kind == "characteristic":
            return characteristic_vector(p["n"], p["elements"])
        if self.kind == "quadratic_ds":
            return quadratic_difference_set(p["q"])[1]
        if self.kind == "quartic_ds":
            return quartic_difference_set(p["p"])[1]
        if self.kind == "random_gaussian":
            return random_gaussian_generator(p["n"], p["seed"])
        if self.kind == "fourier_window":
            return fourier_window_generator(p["n"], p["k"])
        if self.kind == "spatial_window":
            seed = None if p.get("ones", False) else p.get("seed")
            return spatial_window_generator(p["n"], p["length"], seed)
        if self.kind == "alltop":
            return alltop_generator(p["n"])
        path = Path(p["path"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        from .io import read_signal

        return read_signal(path)


def load_spec(text):
    """Parse a spec given as inline JSON, a JSON file path, or a catalog name."""
    text = text.strip()
    if text in CATALOG:
        return GeneratorSpec.from_name(text)
    if text.startswith("{"):
        return GeneratorSpec.from_dict(json.loads(text))
    return GeneratorSpec.from_dict(json.loads(Path(text).read_text()))
