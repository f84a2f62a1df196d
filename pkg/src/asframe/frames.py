"""Functional systems, frame operators and their classification."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DimensionMismatch,
    Functional,
    LinearMap,
    NotInvertible,
    PVector,
    Tolerances,
    as_exponent,
    invert,
    operator_p_norm,
    p_norm,
    reciprocal_condition,
)

__all__ = [
    "ExponentMismatch",
    "NotAnASF",
    "NotAReconstruction",
    "SchemaError",
    "FunctionalSystem",
    "ReconstructionSystem",
    "Classification",
    "ReconstructionReport",
    "frame_operator",
    "classify",
    "verify_reconstruction",
    "system_to_dict",
    "system_from_dict",
]


class ExponentMismatch(ValueError):
    pass


class NotAnASF(ValueError):
    pass


class NotAReconstruction(ValueError):
    pass


class SchemaError(ValueError):
    """Raised for JSON input that does not match the system schema.

    ``field`` holds a path such as ``pairs[3].tau``.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _rows(data, what: str) -> np.ndarray:
    arr = np.array(data)
    if arr.dtype.kind == "c":
        arr = arr.astype(np.complex128)
    elif arr.dtype.kind in "biuf":
        arr = arr.astype(np.float64)
    else:
        raise TypeError(f"{what}: expected numeric data, got dtype {arr.dtype}")
    if arr.ndim != 2:
        raise ValueError(f"{what}: expected a 2-d array of rows, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what}: entries must be finite")
    arr.flags.writeable = False
    return arr


class FunctionalSystem:
    """An ordered list of pairs ``(f_n, tau_n)`` over l^p(d).

    Stored as two ``N x d`` arrays: row ``n`` of ``functionals`` holds the
    coefficients of ``f_n`` and row ``n`` of ``vectors`` holds ``tau_n``.
    """

    def __init__(self, functionals, vectors, p=2.0):
        F = _rows(functionals, "functionals")
        T = _rows(vectors, "vectors")
        if F.shape != T.shape:
            raise DimensionMismatch(f"functionals {F.shape} and vectors {T.shape} disagree")
        n, d = F.shape
        if n < 1:
            raise ValueError("a functional system needs at least one pair")
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.functionals = F
        self.vectors = T
        self.p = as_exponent(p)

    @classmethod
    def from_pairs(cls, pairs, p=2.0) -> "FunctionalSystem":
        pairs = list(pairs)
        if not pairs:
            raise ValueError("a functional system needs at least one pair")
        fs = [f.coeffs if isinstance(f, Functional) else np.asarray(f) for f, _ in pairs]
        ts = [t.coords if isinstance(t, PVector) else np.asarray(t) for _, t in pairs]
        if len({f.shape for f in fs} | {t.shape for t in ts}) != 1:
            raise DimensionMismatch("all functionals and vectors must share one length")
        return cls(np.stack(fs), np.stack(ts), p)

    @property
    def dim(self) -> int:
        return self.functionals.shape[1]

    def __len__(self) -> int:
        return self.functionals.shape[0]

    @property
    def scalar(self) -> str:
        complex_ = np.iscomplexobj(self.functionals) or np.iscomplexobj(self.vectors)
        return "complex" if complex_ else "real"

    @property
    def pairs(self) -> list[tuple[Functional, PVector]]:
        return [(Functional(f), PVector(t, self.p)) for f, t in zip(self.functionals, self.vectors)]

    def concat(self, other: "FunctionalSystem") -> "FunctionalSystem":
        if other.dim != self.dim:
            raise DimensionMismatch(f"cannot join systems of dim {self.dim} and {other.dim}")
        if other.p != self.p:
            raise ExponentMismatch(f"cannot join systems with p={self.p} and p={other.p}")
        return FunctionalSystem(
            np.concatenate([self.functionals, other.functionals]),
            np.concatenate([self.vectors, other.vectors]),
            self.p,
        )

    def scaled(self, c) -> "FunctionalSystem":
        """Same system with every functional multiplied by ``c``."""
        return FunctionalSystem(c * self.functionals, self.vectors, self.p)

    def __repr__(self):
        return f"FunctionalSystem(dim={self.dim}, n_pairs={len(self)}, p={self.p}, scalar={self.scalar!r})"


def frame_operator(sys: FunctionalSystem, compensated: bool = False) -> LinearMap:
    """``S x = sum_n f_n(x) tau_n``, summed in pair order."""
    dtype = np.result_type(sys.functionals, sys.vectors)
    S = np.zeros((sys.dim, sys.dim), dtype=dtype)
    if not compensated:
        for f, tau in zip(sys.functionals, sys.vectors):
            S += np.outer(tau, f)
        return LinearMap(S)
    carry = np.zeros_like(S)
    for f, tau in zip(sys.functionals, sys.vectors):
        y = np.outer(tau, f) - carry
        t = S + y
        carry = (t - S) - y
        S = t
    return LinearMap(S)


class ReconstructionSystem(FunctionalSystem):
    """A system whose frame operator is the identity within ``residual_tol``."""

    def __init__(self, functionals, vectors, p=2.0, tol: Tolerances | None = None):
        super().__init__(functionals, vectors, p)
        tol = tol or Tolerances()
        S = frame_operator(self, tol.compensated).entries
        residual = float(np.abs(S - np.eye(self.dim)).sum(axis=1).max())
        if residual > tol.residual_tol:
            raise NotAReconstruction(f"||S - I||_inf = {residual:.3e} exceeds {tol.residual_tol:.3e}")
        self.residual = residual

    @classmethod
    def canonical(cls, d: int, p=2.0, dtype=np.float64) -> "ReconstructionSystem":
        """Coordinate functionals paired with the standard basis."""
        eye = np.eye(d, dtype=dtype)
        return cls(eye, eye, p)

    @classmethod
    def from_system(cls, sys: FunctionalSystem, tol: Tolerances | None = None) -> "ReconstructionSystem":
        return cls(sys.functionals, sys.vectors, sys.p, tol)


def _scalar_out(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


@dataclass(frozen=True)
class Classification:
    bessel_bound: float
    bessel_bound_is_estimate: bool
    is_asf: bool
    tight_lambda: complex | float | None
    # smallest over largest singular value of S
    condition_estimate: float

    def to_dict(self) -> dict:
        return {
            "bessel_bound": self.bessel_bound,
            "bessel_bound_is_estimate": self.bessel_bound_is_estimate,
            "is_asf": self.is_asf,
            "tight_lambda": self.tight_lambda,
            "condition_estimate": self.condition_estimate,
        }


def classify(sys: FunctionalSystem, tol: Tolerances | None = None, seed: int = 0) -> Classification:
    tol = tol or Tolerances()
    S = frame_operator(sys, tol.compensated).entries
    bound = operator_p_norm(S, sys.p, seed=seed)
    try:
        invert(S, tol)
        is_asf = True
    except NotInvertible:
        is_asf = False

    lam = np.trace(S) / sys.dim
    tight = None
    if is_asf and abs(lam) > tol.residual_tol:
        deviation = np.abs(S - lam * np.eye(sys.dim)).sum(axis=1).max()
        if deviation <= tol.residual_tol:
            tight = _scalar_out(lam)
    return Classification(
        bessel_bound=bound.value,
        bessel_bound_is_estimate=bound.is_estimate,
        is_asf=is_asf,
        tight_lambda=tight,
        condition_estimate=reciprocal_condition(S),
    )


@dataclass(frozen=True)
class ReconstructionReport:
    trials: int
    assembly_residual: float
    reconstruction_residual: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "assembly_residual": self.assembly_residual,
            "reconstruction_residual": self.reconstruction_residual,
            "passed": self.passed,
        }


def verify_reconstruction(
    sys: FunctionalSystem, trials: int = 100, seed: int = 0, tol: Tolerances | None = None
) -> ReconstructionReport:
    """Check ``x = sum_n f_n(x) S^{-1} tau_n`` on seeded random ``x``.

    Also checks that the assembled ``S`` agrees with the term-by-term sum.
    """
    tol = tol or Tolerances()
    if trials < 1:
        raise ValueError("trials must be >= 1")
    S = frame_operator(sys, tol.compensated).entries
    try:
        S_inv = invert(S, tol).entries
    except NotInvertible as exc:
        raise NotAnASF(str(exc)) from exc
    duals = sys.vectors @ S_inv.T  # row n is S^{-1} tau_n

    rng = np.random.Generator(np.random.Philox(seed))
    complex_ = sys.scalar == "complex"
    assembly = reconstruction = 0.0
    for _ in range(trials):
        x = rng.uniform(-1, 1, sys.dim)
        if complex_:
            x = x + 1j * rng.uniform(-1, 1, sys.dim)
        direct = np.zeros(sys.dim, dtype=duals.dtype if complex_ else np.float64)
        recon = np.zeros_like(direct)
        for f, tau, dual in zip(sys.functionals, sys.vectors, duals):
            c = f @ x
            direct = direct + c * tau
            recon = recon + c * dual
        assembly = max(assembly, p_norm(S @ x - direct, sys.p))
        reconstruction = max(reconstruction, p_norm(x - recon, sys.p))
    passed = assembly <= tol.residual_tol and reconstruction <= tol.residual_tol
    return ReconstructionReport(trials, assembly, reconstruction, passed)


# -- JSON schema ------------------------------------------------------------


def _encode_entries(row: np.ndarray, complex_: bool) -> list:
    if complex_:
        return [[float(z.real), float(z.imag)] for z in row]
    return [float(v) for v in row]


def system_to_dict(sys: FunctionalSystem) -> dict:
    complex_ = sys.scalar == "complex"
    return {
        "dim": sys.dim,
        "p": "inf" if math.isinf(sys.p) else sys.p,
        "scalar": sys.scalar,
        "pairs": [
            {"f": _encode_entries(f, complex_), "tau": _encode_entries(t, complex_)}
            for f, t in zip(sys.functionals, sys.vectors)
        ],
    }


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _decode_entries(raw, dim: int, complex_: bool, field: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise SchemaError(field, "expected a list")
    if len(raw) != dim:
        raise SchemaError(field, f"expected length {dim}, got {len(raw)}")
    out = np.empty(dim, dtype=np.complex128 if complex_ else np.float64)
    for i, v in enumerate(raw):
        where = f"{field}[{i}]"
        if complex_:
            if not (isinstance(v, list) and len(v) == 2 and all(_is_number(c) for c in v)):
                raise SchemaError(where, "expected a [re, im] pair")
            out[i] = complex(v[0], v[1])
        else:
            if not _is_number(v):
                raise SchemaError(where, "expected a number")
            out[i] = v
        if not np.isfinite(out[i]):
            raise SchemaError(where, "entry must be finite")
    return out


def system_from_dict(data) -> FunctionalSystem:
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object")
    for key in ("dim", "p", "scalar", "pairs"):
        if key not in data:
            raise SchemaError(key, "missing")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError("dim", "expected an integer >= 1")
    p = data["p"]
    if p != "inf" and not _is_number(p):
        raise SchemaError("p", 'expected a number or "inf"')
    try:
        p = as_exponent(p)
    except ValueError as exc:
        raise SchemaError("p", str(exc)) from None
    scalar = data["scalar"]
    if scalar not in ("real", "complex"):
        raise SchemaError("scalar", 'expected "real" or "complex"')
    pairs = data["pairs"]
    if not isinstance(pairs, list) or not pairs:
        raise SchemaError("pairs", "expected a nonempty list")
    complex_ = scalar == "complex"
    fs, ts = [], []
    for n, pair in enumerate(pairs):
        if not isinstance(pair, dict) or set(pair) != {"f", "tau"}:
            raise SchemaError(f"pairs[{n}]", 'expected an object with keys "f" and "tau"')
        fs.append(_decode_entries(pair["f"], dim, complex_, f"pairs[{n}].f"))
        ts.append(_decode_entries(pair["tau"], dim, complex_, f"pairs[{n}].tau"))
    return FunctionalSystem(np.stack(fs), np.stack(ts), p)
