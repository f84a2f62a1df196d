"""Independent reference computations used by the tests.

Everything here is written with explicit loops or a different algorithm from
the package code so it can serve as a cross-check.
"""
import numpy as np


def loop_matvec(A, x):
    A = np.asarray(A)
    out = [0] * A.shape[0]
    for i in range(A.shape[0]):
        acc = 0
        for j in range(A.shape[1]):
            acc += A[i, j] * x[j]
        out[i] = acc
    return np.array(out)


def loop_matmul(A, B):
    A, B = np.asarray(A), np.asarray(B)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.result_type(A, B))
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            acc = 0
            for k in range(A.shape[1]):
                acc += A[i, k] * B[k, j]
            out[i, j] = acc
    return out


def loop_frame_operator(functionals, vectors):
    """sum_n tau_n (x) f_n by an explicit loop nest."""
    F, T = np.asarray(functionals), np.asarray(vectors)
    n_sys, d = F.shape
    S = np.zeros((d, d), dtype=np.result_type(F, T))
    for n in range(n_sys):
        for i in range(d):
            for j in range(d):
                S[i, j] += T[n, i] * F[n, j]
    return S


def max_column_sum(A):
    A = np.asarray(A)
    return max(sum(abs(A[i, j]) for i in range(A.shape[0])) for j in range(A.shape[1]))


def max_row_sum(A):
    A = np.asarray(A)
    return max(sum(abs(A[i, j]) for j in range(A.shape[1])) for i in range(A.shape[0]))


def spectral_norm_shifted(A, power_steps=300, refine_steps=8, seed=0):
    """Largest singular value via iteration on the Gram matrix.

    Plain power steps get close to the top eigenvector of ``A^H A``; shifted
    inverse iteration with a shift just above the current Rayleigh quotient
    then pins it down to rounding.
    """
    A = np.asarray(A)
    G = A.conj().T @ A
    n = G.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + (1j * rng.standard_normal(n) if np.iscomplexobj(G) else 0)
    v = v / np.linalg.norm(v)
    for _ in range(power_steps):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
    mu = float(np.real(v.conj() @ G @ v))
    gersh = max_row_sum(G)
    for _ in range(refine_steps):
        shift = mu + 1e-8 * max(gersh, 1e-300)
        try:
            w = np.linalg.solve(G - shift * np.eye(n), v)
        except np.linalg.LinAlgError:
            break
        v = w / np.linalg.norm(w)
        mu = float(np.real(v.conj() @ G @ v))
    return float(np.sqrt(max(mu, 0.0)))


def uniform(rng, shape, complex_=False):
    x = rng.uniform(-1, 1, shape)
    if complex_:
        x = x + 1j * rng.uniform(-1, 1, shape)
    return x


def low_rank(rng, d_out, d_in, rank, complex_=False):
    A = np.zeros((d_out, d_in), dtype=complex if complex_ else float)
    for _ in range(rank):
        A += np.outer(uniform(rng, d_out, complex_), uniform(rng, d_in, complex_))
    return A
