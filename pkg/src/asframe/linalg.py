"""Dense linear algebra over finite-dimensional l^p spaces.

Vectors, functionals and maps are thin immutable wrappers around numpy
arrays. Scalars are real or complex; the pairing between a functional and a
vector is bilinear, ``f(x) = sum_i f_i x_i`` (no conjugation).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "DimensionMismatch",
    "NotInvertible",
    "UnsupportedExact",
    "Tolerances",
    "PVector",
    "Functional",
    "LinearMap",
    "NormEstimate",
    "as_exponent",
    "conjugate_exponent",
    "p_norm",
    "identity",
    "outer",
    "apply",
    "compose",
    "reciprocal_condition",
    "invert",
    "numerical_rank",
    "rank_factorization",
    "operator_p_norm",
]

TOL_ENV_VAR = "FRAMES_DEFAULT_TOL"

# power-iteration policy for general p
NORM_ITERATIONS = 32
NORM_RESTARTS = 8


class DimensionMismatch(ValueError):
    pass


class NotInvertible(np.linalg.LinAlgError):
    pass


class UnsupportedExact(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    """Numeric policy shared by every check in the package.

    ``rank_tol`` is relative to the largest pivot, ``invert_tol`` is the
    smallest acceptable reciprocal condition number and ``residual_tol`` is
    an absolute bound on identity residuals. ``compensated`` switches frame
    operator assembly to Kahan summation.
    """

    rank_tol: float = 1e-10
    invert_tol: float = 1e-12
    residual_tol: float = 1e-8
    compensated: bool = False

    def __post_init__(self):
        for name in ("rank_tol", "invert_tol", "residual_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be a nonnegative finite number, got {value!r}")
        if self.rank_tol >= 1:
            raise ValueError(f"rank_tol must be < 1, got {self.rank_tol!r}")

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        """Defaults, overridden by ``FRAMES_DEFAULT_TOL``.

        The variable holds comma separated ``key=value`` items, for example
        ``rank_tol=1e-9,residual_tol=1e-7``.
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(TOL_ENV_VAR, "").strip()
        if not raw:
            return cls()
        fields = {}
        for item in raw.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in ("rank_tol", "invert_tol", "residual_tol"):
                raise ValueError(f"bad {TOL_ENV_VAR} item {item!r}")
            fields[key] = float(value)
        return cls(**fields)


def as_exponent(p) -> float:
    """Normalize an exponent; accepts numbers and the string ``"inf"``."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity"):
            return math.inf
        p = float(p)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent must lie in [1, inf], got {p!r}")
    return p


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def p_norm(x, p) -> float:
    return float(np.linalg.norm(np.asarray(x).ravel(), ord=as_exponent(p)))


def _frozen(data, ndim: int, what: str) -> np.ndarray:
    arr = np.array(data)
    if arr.dtype.kind == "c":
        arr = arr.astype(np.complex128)
    elif arr.dtype.kind in "biuf":
        arr = arr.astype(np.float64)
    else:
        raise TypeError(f"{what}: expected numeric data, got dtype {arr.dtype}")
    if arr.ndim != ndim:
        raise ValueError(f"{what}: expected {ndim}-d data, got shape {arr.shape}")
    if arr.size == 0 or 0 in arr.shape:
        raise ValueError(f"{what}: dimensions must be >= 1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what}: entries must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PVector:
    """A point of l^p(d)."""

    coords: np.ndarray
    p: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords, 1, "PVector"))
        object.__setattr__(self, "p", as_exponent(self.p))

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def norm(self) -> float:
        return p_norm(self.coords, self.p)


@dataclass(frozen=True, eq=False)
class Functional:
    """A dual element acting by the bilinear pairing."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs, 1, "Functional"))

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    def __call__(self, x):
        coords = x.coords if isinstance(x, PVector) else np.asarray(x)
        if coords.shape != self.coeffs.shape:
            raise DimensionMismatch(f"functional of length {self.dim} applied to vector of shape {coords.shape}")
        return self.coeffs @ coords


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A dense ``d_out x d_in`` matrix."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries, 2, "LinearMap"))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def d_out(self) -> int:
        return self.entries.shape[0]

    @property
    def d_in(self) -> int:
        return self.entries.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


class NormEstimate(NamedTuple):
    value: float
    is_estimate: bool


def _entries(A) -> np.ndarray:
    return A.entries if isinstance(A, LinearMap) else np.asarray(A)


def identity(d: int) -> LinearMap:
    return LinearMap(np.eye(d))


def outer(omega, g) -> LinearMap:
    """The rank-one map ``x -> g(x) omega``."""
    w = omega.coords if isinstance(omega, PVector) else np.asarray(omega)
    c = g.coeffs if isinstance(g, Functional) else np.asarray(g)
    return LinearMap(np.outer(w, c))


def apply(A, x: PVector) -> PVector:
    a = _entries(A)
    if not isinstance(x, PVector):
        x = PVector(x)
    if a.shape[1] != x.dim:
        raise DimensionMismatch(f"map with d_in={a.shape[1]} applied to vector of dim {x.dim}")
    return PVector(a @ x.coords, x.p)


def compose(A, B) -> LinearMap:
    """``A o B``, i.e. apply ``B`` first."""
    a, b = _entries(A), _entries(B)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot compose {a.shape} after {b.shape}")
    return LinearMap(a @ b)


def reciprocal_condition(A) -> float:
    """Smallest over largest singular value; 0 for a zero or non-square map."""
    a = _entries(A)
    if a.shape[0] != a.shape[1]:
        return 0.0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0:
        return 0.0
    return float(s[-1] / s[0])


def invert(A, tol: Tolerances | None = None) -> LinearMap:
    tol = tol or Tolerances()
    a = _entries(A)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"only square maps can be inverted, got shape {a.shape}")
    rcond = reciprocal_condition(a)
    if rcond < tol.invert_tol or rcond == 0:
        raise NotInvertible(f"reciprocal condition {rcond:.3e} below {tol.invert_tol:.3e}")
    eye = np.eye(a.shape[0])
    inv = np.linalg.solve(a, eye)
    residual = max(
        np.abs(a @ inv - eye).sum(axis=1).max(),
        np.abs(inv @ a - eye).sum(axis=1).max(),
    )
    if residual > tol.residual_tol:
        raise NotInvertible(f"inverse residual {residual:.3e} exceeds {tol.residual_tol:.3e}")
    return LinearMap(inv)


def _pivoted_elimination(a: np.ndarray, rank_tol: float, scale: float = 0.0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Gaussian elimination with complete pivoting.

    Each step takes the largest remaining entry (first in row-major order on
    ties) as pivot and peels off the rank-one term ``column/pivot (x) row``.
    Stops once the best remaining entry is at most ``rank_tol`` times the
    larger of ``scale`` and the largest pivot seen so far.
    """
    r = np.array(a, dtype=np.complex128 if np.iscomplexobj(a) else np.float64)
    terms = []
    largest = float(scale)
    for _ in range(min(r.shape)):
        mags = np.abs(r)
        i, j = np.unravel_index(np.argmax(mags), mags.shape)
        pivot_mag = mags[i, j]
        if pivot_mag == 0 or pivot_mag <= rank_tol * largest:
            break
        largest = max(largest, pivot_mag)
        col = r[:, j] / r[i, j]
        row = r[i, :].copy()
        terms.append((col, row))
        r -= np.outer(col, row)
        r[i, :] = 0
        r[:, j] = 0
    return terms


def numerical_rank(A, tol: Tolerances | None = None, scale: float = 0.0) -> int:
    """Number of pivots above ``rank_tol`` times the largest pivot.

    ``scale`` raises the reference magnitude. Pass the size of the operands
    when ``A`` is a difference that may cancel to rounding noise.
    """
    tol = tol or Tolerances()
    return len(_pivoted_elimination(_entries(A), tol.rank_tol, scale))


def rank_factorization(
    A, tol: Tolerances | None = None, p=2.0, scale: float = 0.0
) -> list[tuple[PVector, Functional]]:
    """Write ``A`` as ``sum_k omega_k (x) g_k`` with ``numerical_rank(A)`` terms."""
    tol = tol or Tolerances()
    terms = _pivoted_elimination(_entries(A), tol.rank_tol, scale)
    return [(PVector(col, p), Functional(row)) for col, row in terms]


def _dual_vector(y: np.ndarray, p: float) -> np.ndarray:
    """``w`` with ``||w||_q = 1`` and ``sum(w * y) = ||y||_p``."""
    mag = np.abs(y)
    nrm = np.linalg.norm(y, ord=p)
    w = np.zeros_like(y)
    if nrm == 0:
        return w
    nz = mag > 0
    phase = np.zeros_like(y)
    phase[nz] = np.conj(y[nz]) / mag[nz]
    if p == 1:
        return phase
    if math.isinf(p):
        k = int(np.argmax(mag))
        w[k] = phase[k]
        return w
    return phase * (mag / nrm) ** (p - 1)


def _estimate_p_norm(a: np.ndarray, p: float, seed: int) -> float:
    q = conjugate_exponent(p)
    d_in = a.shape[1]
    col_norms = np.linalg.norm(a, ord=p, axis=0) if not math.isinf(p) else np.abs(a).max(axis=0)
    start = np.zeros(d_in, dtype=a.dtype)
    start[int(np.argmax(col_norms))] = 1
    starts = [start]
    rng = np.random.Generator(np.random.Philox(seed))
    for _ in range(NORM_RESTARTS - 1):
        x = rng.uniform(-1, 1, d_in)
        if np.iscomplexobj(a):
            x = x + 1j * rng.uniform(-1, 1, d_in)
        starts.append(x)

    best = 0.0
    for x in starts:
        x = x / np.linalg.norm(x, ord=p)
        for _ in range(NORM_ITERATIONS):
            y = a @ x
            est = np.linalg.norm(y, ord=p) / np.linalg.norm(x, ord=p)
            best = max(best, float(est))
            if est == 0:
                break
            z = a.T @ _dual_vector(y, p)
            if np.linalg.norm(z, ord=q) <= est * (1 + 1e-15):
                break
            x = _dual_vector(z, q)
    return best


def operator_p_norm(A, p, mode: str = "auto", seed: int = 0) -> NormEstimate:
    """Induced norm of ``A`` from l^p to l^p.

    ``mode="exact"`` is available for p in {1, 2, inf}. ``mode="estimate"``
    runs a dual-exponent power iteration and returns the best ratio
    ``||Ax||_p / ||x||_p`` it saw, which is a lower bound on the norm.
    ``mode="auto"`` picks exact when it can.
    """
    p = as_exponent(p)
    a = _entries(A)
    has_exact = p in (1.0, 2.0) or math.isinf(p)
    if mode == "auto":
        mode = "exact" if has_exact else "estimate"
    if mode == "exact":
        if not has_exact:
            raise UnsupportedExact(f"no exact induced norm for p={p}")
        if p == 1:
            return NormEstimate(float(np.abs(a).sum(axis=0).max()), False)
        if p == 2:
            return NormEstimate(float(np.linalg.norm(a, ord=2)), False)
        return NormEstimate(float(np.abs(a).sum(axis=1).max()), False)
    if mode != "estimate":
        raise ValueError(f"unknown mode {mode!r}")
    return NormEstimate(_estimate_p_norm(a, p, seed), True)
