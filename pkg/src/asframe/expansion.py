"""Expanding approximate Bessel systems to (tight) approximate Schauder frames.

Given a system with frame operator ``S`` and a reconstruction system
``(g_n, omega_n)``, appending the pairs

* variant A: ``(g_n, (I - S) omega_n)``
* variant B: ``(g_n o (I - S), omega_n)``
* tight:     ``(g_n, (lam I - S) omega_n)``

gives a system whose frame operator is ``I`` (or ``lam I``).
``minimal_tight_completion`` instead appends exactly ``rank(lam I - S)``
pairs taken from a rank factorization of the deficiency ``lam I - S``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .frames import (
    ExponentMismatch,
    FunctionalSystem,
    ReconstructionSystem,
    frame_operator,
)
from .linalg import (
    DimensionMismatch,
    Functional,
    PVector,
    Tolerances,
    conjugate_exponent,
    numerical_rank,
    rank_factorization,
)

if TYPE_CHECKING:
    from .sequence_spaces import PASFCertificate

__all__ = [
    "ZeroLambda",
    "ExpansionResult",
    "expand_variant_a",
    "expand_variant_b",
    "expand_tight",
    "completion_lower_bound",
    "minimal_tight_completion",
    "deficiency",
]


class ZeroLambda(ValueError):
    pass


def _scalar_out(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


@dataclass(frozen=True, eq=False)
class ExpansionResult:
    original: FunctionalSystem
    added_functionals: np.ndarray  # k x d, row k is h_k
    added_vectors: np.ndarray  # k x d, row k is rho_k
    expanded: FunctionalSystem
    variant: str
    lam: complex | float
    # ||frame_operator(expanded) - lam I||_inf
    residual: float
    certificate: "PASFCertificate | None" = field(default=None)

    @property
    def count_added(self) -> int:
        return self.added_functionals.shape[0]

    @property
    def added_pairs(self) -> list[tuple[Functional, PVector]]:
        p = self.original.p
        return [(Functional(h), PVector(r, p)) for h, r in zip(self.added_functionals, self.added_vectors)]

    def to_dict(self) -> dict:
        complex_ = self.expanded.scalar == "complex"

        def enc(row):
            if complex_:
                return [[float(z.real), float(z.imag)] for z in row]
            return [float(v) for v in row]

        out = {
            "variant": self.variant,
            "lambda": self.lam,
            "count_added": self.count_added,
            "added_pairs": [
                {"f": enc(h), "tau": enc(r)} for h, r in zip(self.added_functionals, self.added_vectors)
            ],
            "residual": self.residual,
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out


def deficiency(sys: FunctionalSystem, lam=1.0, tol: Tolerances | None = None) -> np.ndarray:
    """``lam I - S`` as an array."""
    tol = tol or Tolerances()
    S = frame_operator(sys, tol.compensated).entries
    return lam * np.eye(sys.dim) - S


def _deficiency_scale(sys: FunctionalSystem, lam, D: np.ndarray) -> float:
    # max entry of lam I and S; cancellation in lam I - S is relative to this
    S_max = np.abs(lam * np.eye(sys.dim) - D).max()
    return float(max(abs(lam), S_max))


def _check_lambda(lam):
    if lam == 0:
        raise ZeroLambda("lambda must be nonzero")


def _resolve_recon(sys: FunctionalSystem, recon) -> FunctionalSystem:
    if recon is None:
        return ReconstructionSystem.canonical(sys.dim, sys.p)
    if recon.dim != sys.dim:
        raise DimensionMismatch(f"system has dim {sys.dim}, reconstruction system has dim {recon.dim}")
    if recon.p != sys.p:
        raise ExponentMismatch(f"system has p={sys.p}, reconstruction system has p={recon.p}")
    return recon


def _build(sys, H, R, keep, variant, lam, tol) -> ExpansionResult:
    H, R = H[keep], R[keep]
    expanded = sys.concat(FunctionalSystem(H, R, sys.p)) if len(H) else sys
    S = frame_operator(expanded, tol.compensated).entries
    residual = float(np.abs(S - lam * np.eye(sys.dim)).sum(axis=1).max())
    H.flags.writeable = False
    R.flags.writeable = False
    return ExpansionResult(sys, H, R, expanded, variant, _scalar_out(lam), residual)


def _row_norms(rows: np.ndarray, p: float) -> np.ndarray:
    return np.linalg.norm(rows, ord=p, axis=1)


def expand_variant_a(
    sys: FunctionalSystem,
    recon: FunctionalSystem | None = None,
    *,
    prune: bool = True,
    tol: Tolerances | None = None,
) -> ExpansionResult:
    """Append ``(g_n, (I - S) omega_n)``; drops pairs with ``||rho_n||_p <= rank_tol``."""
    return _expand_a_like(sys, recon, 1.0, "A", prune, tol)


def expand_tight(
    sys: FunctionalSystem,
    lam,
    recon: FunctionalSystem | None = None,
    *,
    prune: bool = True,
    tol: Tolerances | None = None,
) -> ExpansionResult:
    """Append ``(g_n, (lam I - S) omega_n)`` so the frame operator becomes ``lam I``."""
    _check_lambda(lam)
    return _expand_a_like(sys, recon, lam, "TIGHT", prune, tol)


def _expand_a_like(sys, recon, lam, variant, prune, tol):
    tol = tol or Tolerances()
    recon = _resolve_recon(sys, recon)
    D = deficiency(sys, lam, tol)
    H = np.array(recon.functionals)
    R = recon.vectors @ D.T  # row n is D omega_n
    keep = _row_norms(R, sys.p) > tol.rank_tol if prune else np.ones(len(R), dtype=bool)
    return _build(sys, H, R, keep, variant, lam, tol)


def expand_variant_b(
    sys: FunctionalSystem,
    recon: FunctionalSystem | None = None,
    *,
    prune: bool = True,
    tol: Tolerances | None = None,
) -> ExpansionResult:
    """Append ``(g_n o (I - S), omega_n)``; drops pairs with ``||h_n|| <= rank_tol``.

    The functional norm is the dual (``q``) norm of the coefficient row.
    """
    tol = tol or Tolerances()
    recon = _resolve_recon(sys, recon)
    D = deficiency(sys, 1.0, tol)
    H = recon.functionals @ D  # row n is g_n o (I - S)
    R = np.array(recon.vectors)
    q = conjugate_exponent(sys.p)
    keep = _row_norms(H, q) > tol.rank_tol if prune else np.ones(len(H), dtype=bool)
    return _build(sys, H, R, keep, "B", 1.0, tol)


def completion_lower_bound(sys: FunctionalSystem, lam=1.0, tol: Tolerances | None = None) -> int:
    """``rank(lam I - S)``: no lam-tight expansion can add fewer pairs."""
    _check_lambda(lam)
    tol = tol or Tolerances()
    D = deficiency(sys, lam, tol)
    return numerical_rank(D, tol, _deficiency_scale(sys, lam, D))


def minimal_tight_completion(sys: FunctionalSystem, lam=1.0, tol: Tolerances | None = None) -> ExpansionResult:
    """Append exactly ``rank(lam I - S)`` pairs making the system ``lam``-tight."""
    _check_lambda(lam)
    tol = tol or Tolerances()
    D = deficiency(sys, lam, tol)
    terms = rank_factorization(D, tol, sys.p, _deficiency_scale(sys, lam, D))
    dtype = np.result_type(D, sys.functionals)
    if terms:
        R = np.array([omega.coords for omega, _ in terms], dtype=dtype)
        H = np.array([g.coeffs for _, g in terms], dtype=dtype)
    else:
        R = H = np.zeros((0, sys.dim), dtype=dtype)
    return _build(sys, H, R, np.ones(len(terms), dtype=bool), "TIGHT", lam, tol)
