"""Truncated sequence spaces l^p(d): shifts, canonical systems, generators
and the analysis/synthesis factorization of a frame operator."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .expansion import ExpansionResult, expand_variant_a
from .frames import FunctionalSystem, ReconstructionSystem
from .linalg import (
    LinearMap,
    NormEstimate,
    Tolerances,
    compose,
    operator_p_norm,
)

__all__ = [
    "DimensionTooSmall",
    "shift_right",
    "shift_left",
    "basis_vector",
    "coordinate_functional",
    "canonical_system",
    "example_one_system",
    "analysis_operator",
    "synthesis_operator",
    "PASFCertificate",
    "p_asf_expansion",
    "random_system",
    "deficiency_system",
    "GENERATORS",
    "generate",
]


class DimensionTooSmall(ValueError):
    pass


def shift_right(d: int) -> LinearMap:
    """``(x_1, ..., x_d) -> (0, x_1, ..., x_{d-1})``; the last coordinate falls off."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return LinearMap(np.eye(d, k=-1))


def shift_left(d: int) -> LinearMap:
    """``(x_1, ..., x_d) -> (x_2, ..., x_d, 0)``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return LinearMap(np.eye(d, k=1))


def basis_vector(n: int, d: int) -> np.ndarray:
    """``e_n`` with 1-based ``n``."""
    e = np.zeros(d)
    e[n - 1] = 1.0
    return e


def coordinate_functional(n: int, d: int) -> np.ndarray:
    """Coefficients of ``zeta_n``, which reads off the ``n``-th coordinate."""
    return basis_vector(n, d)


def canonical_system(d: int, p=2.0, dtype=np.float64) -> ReconstructionSystem:
    return ReconstructionSystem.canonical(d, p, dtype)


def example_one_system(d: int, p=2.0, prune: bool = True) -> FunctionalSystem:
    """Pairs ``f_n = zeta_n o L`` and ``tau_n = R e_n``, ``n = 1..d``.

    The frame operator is ``R L = diag(0, 1, ..., 1)``. Under truncation the
    last pair is ``(0, 0)``; ``prune`` drops it, leaving ``d - 1`` pairs.
    """
    if d < 2:
        raise DimensionTooSmall(f"the shift example needs d >= 2, got {d}")
    R, L = shift_right(d).entries, shift_left(d).entries
    eye = np.eye(d)
    F = eye @ L  # row n: zeta_n o L
    T = (R @ eye).T  # row n: R e_n
    if prune:
        F, T = F[:-1], T[:-1]
    return FunctionalSystem(F, T, p)


def analysis_operator(sys: FunctionalSystem) -> LinearMap:
    """``x -> (f_n(x))_n`` as an ``N x d`` map."""
    return LinearMap(sys.functionals)


def synthesis_operator(sys: FunctionalSystem) -> LinearMap:
    """``(a_n)_n -> sum_n a_n tau_n`` as a ``d x N`` map."""
    return LinearMap(sys.vectors.T)


@dataclass(frozen=True)
class PASFCertificate:
    analysis_norm: NormEstimate
    synthesis_norm: NormEstimate
    # ||synthesis o analysis - I||_inf
    factorization_residual: float
    certified: bool

    def to_dict(self) -> dict:
        return {
            "analysis_norm": self.analysis_norm.value,
            "synthesis_norm": self.synthesis_norm.value,
            "norms_are_estimates": self.analysis_norm.is_estimate or self.synthesis_norm.is_estimate,
            "factorization_residual": self.factorization_residual,
            "certified": self.certified,
        }


def p_asf_expansion(sys: FunctionalSystem, tol: Tolerances | None = None, seed: int = 0) -> ExpansionResult:
    """Expand with ``(zeta_n, (I - S) e_n)`` and certify the p-ASF property.

    The certificate records the l^p norms of the expanded analysis and
    synthesis maps and how far their composition is from the identity.
    """
    tol = tol or Tolerances()
    result = expand_variant_a(sys, canonical_system(sys.dim, sys.p), tol=tol)
    theta_f = analysis_operator(result.expanded)
    theta_tau = synthesis_operator(result.expanded)
    a_norm = operator_p_norm(theta_f, sys.p, seed=seed)
    s_norm = operator_p_norm(theta_tau, sys.p, seed=seed)
    product = compose(theta_tau, theta_f).entries
    residual = float(np.abs(product - np.eye(sys.dim)).sum(axis=1).max())
    certified = bool(np.isfinite(a_norm.value) and np.isfinite(s_norm.value) and residual <= tol.residual_tol)
    cert = PASFCertificate(a_norm, s_norm, residual, certified)
    return dataclasses.replace(result, certificate=cert)


# -- seeded generators ------------------------------------------------------


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _uniform(rng, shape, scalar: str) -> np.ndarray:
    x = rng.uniform(-1, 1, shape)
    if scalar == "complex":
        x = x + 1j * rng.uniform(-1, 1, shape)
    return x


def random_system(d: int, n_sys: int, seed: int, p=2.0, scalar: str = "real") -> FunctionalSystem:
    """Functionals and vectors with entries uniform in [-1, 1] (real and imaginary parts)."""
    rng = _rng(seed)
    return FunctionalSystem(_uniform(rng, (n_sys, d), scalar), _uniform(rng, (n_sys, d), scalar), p)


def deficiency_system(
    d: int, n_sys: int, rank: int, seed: int, p=2.0, scalar: str = "real"
) -> FunctionalSystem:
    """A system with ``rank(I - S) == rank`` by construction.

    ``S = I - K`` where ``K`` is a sum of ``rank`` random outer products
    scaled to spectral norm 0.5. ``S`` is then split into ``n_sys >= d``
    pairs through an isometric analysis map ``Q`` (``Q^H Q = I``), so that
    ``S = (S Q^H) Q`` holds to rounding.
    """
    if not 0 <= rank <= d:
        raise ValueError(f"rank must lie in [0, {d}], got {rank}")
    if n_sys < d:
        raise ValueError(f"need n_sys >= d to carry an invertible S, got n_sys={n_sys} < d={d}")
    rng = _rng(seed)
    K = np.zeros((d, d), dtype=np.complex128 if scalar == "complex" else np.float64)
    for _ in range(rank):
        K += np.outer(_uniform(rng, d, scalar), _uniform(rng, d, scalar))
    if rank:
        K *= 0.5 / np.linalg.norm(K, ord=2)
    S = np.eye(d) - K
    Q, _ = np.linalg.qr(_uniform(rng, (n_sys, d), scalar))
    F = Q  # rows are functionals
    T = (S @ Q.conj().T).T  # rows are vectors
    return FunctionalSystem(F, T, p)


def _gen_example1(d=4, p=2.0, **_):
    return example_one_system(d, p)


def _gen_canonical(d=4, p=2.0, scalar="real", **_):
    return canonical_system(d, p, np.complex128 if scalar == "complex" else np.float64)


def _gen_random(d=4, p=2.0, seed=0, n_sys=None, rank=None, scalar="real", **_):
    if rank is None:
        return random_system(d, n_sys if n_sys is not None else d, seed, p, scalar)
    return deficiency_system(d, n_sys if n_sys is not None else d, rank, seed, p, scalar)


GENERATORS = {
    "example1": _gen_example1,
    "canonical": _gen_canonical,
    "random": _gen_random,
}


def generate(name: str, **params) -> FunctionalSystem:
    try:
        gen = GENERATORS[name]
    except KeyError:
        raise ValueError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}") from None
    return gen(**params)
