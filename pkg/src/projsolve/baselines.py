"""Reference solvers: Householder QR, randomized Kaczmarz, LSQR, LSMR.

All of them are written out here (rather than delegated to LAPACK or
scipy) so that they can be instrumented with the same :class:`OpCounter`
categories as the projection solver. For the iterative methods, the matrix
products ``A v`` and ``A^T u`` are tallied under ``pivot_dot_mults``, vector
recurrences under ``update_mults`` and norms/scalars under ``aux_mults``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SingularGram, SingularPivot, SizeGuardError, ZeroRow
from .linalg import SINGULARITY_RTOL, OpCounter, as_matrix, as_vector, max_column_norm, norm2
from .rng import KACZMARZ, philox
from .solver import Solution

ORACLE_MAX_N = 64


@dataclass(frozen=True)
class IterativeConfig:
    """Budget for the iterative baselines.

    ``max_sweeps`` is the Kaczmarz budget in full sweeps of ``m`` row updates.
    ``max_iterations`` caps LSQR/LSMR; ``None`` means ``2 n``.
    """

    max_sweeps: int = 100
    seed: int = 0
    tolerance: float = 1e-12
    max_iterations: int | None = None

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


def _system(A, b):
    A = as_matrix(A, "A")
    b = as_vector(b, "b")
    if b.size != A.shape[0]:
        raise DimensionError(f"A has {A.shape[0]} rows but b has length {b.size}")
    return A, b


def householder_qr_solve(A, b, counter: OpCounter | None = None) -> Solution:
    """Least squares via Householder reflections and back substitution."""
    A, b = _system(A, b)
    m, n = A.shape
    if m < n:
        raise DimensionError(f"need m >= n, got {A.shape}")
    if counter is None:
        counter = OpCounter()
    R = A.copy()
    y = b.copy()
    floor = SINGULARITY_RTOL * max_column_norm(A)

    for k in range(n):
        L = m - k
        x = R[k:, k]
        alpha = math.sqrt(float(x @ x))
        counter.add("aux_mults", L)
        if not alpha > floor:
            raise SingularPivot(k, alpha * alpha, floor * floor)
        v = x.copy()
        v[0] += math.copysign(alpha, x[0])
        tau = 2.0 / float(v @ v)
        counter.add("aux_mults", L)
        counter.add("normalization_ops", 1)

        rest = R[k:, k + 1:]
        w = tau * (v @ rest)
        rest -= np.outer(v, w)
        ncols = n - k - 1
        counter.add("pivot_dot_mults", L * ncols)
        counter.add("aux_mults", ncols)
        counter.add("update_mults", L * ncols)

        R[k, k] = -math.copysign(alpha, x[0])
        R[k + 1:, k] = 0.0

        yk = y[k:]
        yk -= (tau * float(v @ yk)) * v
        counter.add("aux_mults", 2 * L + 1)

    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - R[i, i + 1:] @ x[i + 1:]) / R[i, i]
        counter.add("backsub_mults", n - 1 - i)
        counter.add("normalization_ops", 1)
    return Solution(x=x, residual_norm=norm2(A @ x - b), counter=counter, method="householder_qr")


def randomized_kaczmarz(A, b, cfg: IterativeConfig = IterativeConfig(),
                        counter: OpCounter | None = None) -> Solution:
    """Row-action iteration with rows drawn proportionally to their squared norms.

    Runs exactly ``cfg.max_sweeps * m`` updates from ``x = 0``.
    """
    A, b = _system(A, b)
    m, n = A.shape
    if counter is None:
        counter = OpCounter()
    row_sq = np.einsum("ij,ij->i", A, A)
    zero = np.flatnonzero(row_sq == 0.0)
    if zero.size:
        raise ZeroRow(int(zero[0]))
    steps = cfg.max_sweeps * m
    rows = philox(cfg.seed, KACZMARZ).choice(m, size=steps, p=row_sq / row_sq.sum())

    x = np.zeros(n)
    for i in rows:
        a = A[i]
        x += ((b[i] - a @ x) / row_sq[i]) * a
    counter.add("aux_mults", m * n)
    counter.add("pivot_dot_mults", steps * n)
    counter.add("normalization_ops", steps)
    counter.add("update_mults", steps * n)
    return Solution(x=x, residual_norm=norm2(A @ x - b), counter=counter,
                    method="kaczmarz", iterations=steps)


def _budget(cfg, n):
    return cfg.max_iterations if cfg.max_iterations is not None else 2 * n


def lsqr_solve(A, b, cfg: IterativeConfig = IterativeConfig(),
               counter: OpCounter | None = None) -> Solution:
    """LSQR (Golub-Kahan bidiagonalization with QR updates), no damping."""
    A, b = _system(A, b)
    m, n = A.shape
    if counter is None:
        counter = OpCounter()
    x = np.zeros(n)
    beta = norm2(b)
    if beta == 0.0:
        return Solution(x=x, residual_norm=0.0, counter=counter, method="lsqr", iterations=0)
    u = b / beta
    v = A.T @ u
    alpha = norm2(v)
    counter.add("pivot_dot_mults", m * n)
    counter.add("aux_mults", m + 2 * n)
    counter.add("normalization_ops", 2)
    if alpha == 0.0:
        return Solution(x=x, residual_norm=beta, counter=counter, method="lsqr", iterations=0)
    v /= alpha
    w = v.copy()
    phibar, rhobar = beta, alpha
    norm_a = norm2(A)  # Frobenius, used only in the stopping test
    bnorm = beta
    tol = cfg.tolerance

    itn = 0
    for itn in range(1, _budget(cfg, n) + 1):
        u = A @ v - alpha * u
        beta = norm2(u)
        counter.add("pivot_dot_mults", m * n)
        counter.add("update_mults", m)
        counter.add("aux_mults", m)
        if beta > 0.0:
            u /= beta
            counter.add("normalization_ops", m)
            v = A.T @ u - beta * v
            alpha = norm2(v)
            counter.add("pivot_dot_mults", m * n)
            counter.add("update_mults", n)
            counter.add("aux_mults", n)
            if alpha > 0.0:
                v /= alpha
                counter.add("normalization_ops", n)

        rho = math.hypot(rhobar, beta)
        c = rhobar / rho
        s = beta / rho
        theta = s * alpha
        rhobar = -c * alpha
        phi = c * phibar
        phibar = s * phibar
        x += (phi / rho) * w
        w = v - (theta / rho) * w
        counter.add("aux_mults", 6)
        counter.add("normalization_ops", 4)
        counter.add("update_mults", 2 * n)

        # phibar = ||r||, phibar * alpha * |c| = ||A^T r||
        if phibar <= tol * bnorm or phibar * alpha * abs(c) <= tol * norm_a * phibar:
            break
        if alpha == 0.0 or beta == 0.0:
            break
    return Solution(x=x, residual_norm=norm2(A @ x - b), counter=counter,
                    method="lsqr", iterations=itn)


def lsmr_solve(A, b, cfg: IterativeConfig = IterativeConfig(),
               counter: OpCounter | None = None) -> Solution:
    """LSMR (MINRES applied to the normal equations via Golub-Kahan), no damping."""
    A, b = _system(A, b)
    m, n = A.shape
    if counter is None:
        counter = OpCounter()
    x = np.zeros(n)
    beta = norm2(b)
    if beta == 0.0:
        return Solution(x=x, residual_norm=0.0, counter=counter, method="lsmr", iterations=0)
    u = b / beta
    v = A.T @ u
    alpha = norm2(v)
    counter.add("pivot_dot_mults", m * n)
    counter.add("aux_mults", m + 2 * n)
    counter.add("normalization_ops", 2)
    if alpha == 0.0:
        return Solution(x=x, residual_norm=beta, counter=counter, method="lsmr", iterations=0)
    v /= alpha

    zetabar = alpha * beta
    alphabar = alpha
    rho = rhobar = cbar = 1.0
    sbar = 0.0
    h = v.copy()
    hbar = np.zeros(n)
    norm_a = norm2(A)
    bnorm = beta
    tol = cfg.tolerance

    itn = 0
    for itn in range(1, _budget(cfg, n) + 1):
        u = A @ v - alpha * u
        beta = norm2(u)
        counter.add("pivot_dot_mults", m * n)
        counter.add("update_mults", m)
        counter.add("aux_mults", m)
        if beta > 0.0:
            u /= beta
            counter.add("normalization_ops", m)
            v = A.T @ u - beta * v
            alpha = norm2(v)
            counter.add("pivot_dot_mults", m * n)
            counter.add("update_mults", n)
            counter.add("aux_mults", n)
            if alpha > 0.0:
                v /= alpha
                counter.add("normalization_ops", n)

        # rotation eliminating beta from the lower bidiagonal
        rhoold = rho
        rho = math.hypot(alphabar, beta)
        c = alphabar / rho
        s = beta / rho
        thetanew = s * alpha
        alphabar = c * alpha

        # second rotation, on the upper bidiagonal of R
        rhobarold = rhobar
        thetabar = sbar * rho
        rhotemp = cbar * rho
        rhobar = math.hypot(rhotemp, thetanew)
        cbar = rhotemp / rhobar
        sbar = thetanew / rhobar
        zeta = cbar * zetabar
        zetabar = -sbar * zetabar

        hbar = h - (thetabar * rho / (rhoold * rhobarold)) * hbar
        x += (zeta / (rho * rhobar)) * hbar
        h = v - (thetanew / rho) * h
        counter.add("aux_mults", 14)
        counter.add("normalization_ops", 8)
        counter.add("update_mults", 3 * n)

        # |zetabar| = ||A^T r||; the residual itself is checked explicitly (not counted)
        rnorm = norm2(b - A @ x)
        if rnorm <= tol * bnorm or abs(zetabar) <= tol * norm_a * rnorm:
            break
        if alpha == 0.0 or beta == 0.0:
            break
    return Solution(x=x, residual_norm=norm2(A @ x - b), counter=counter,
                    method="lsmr", iterations=itn)


def normal_equations_oracle(A, b, max_n: int = ORACLE_MAX_N) -> np.ndarray:
    """Solve ``A^T A x = A^T b`` by Gaussian elimination with partial pivoting.

    Brute-force test oracle; refuses ``n > max_n``.
    """
    A, b = _system(A, b)
    n = A.shape[1]
    if n > max_n:
        raise SizeGuardError(f"normal-equations oracle limited to n <= {max_n}, got {n}")
    G = A.T @ A
    c = A.T @ b
    M = np.hstack([G, c[:, None]])
    tiny = np.finfo(float).eps * n * float(np.max(np.abs(G)))
    for k in range(n):
        piv = k + int(np.argmax(np.abs(M[k:, k])))
        if abs(M[piv, k]) <= tiny:
            raise SingularGram(f"Gram matrix is numerically singular at column {k}")
        if piv != k:
            M[[k, piv]] = M[[piv, k]]
        M[k + 1:, k:] -= np.outer(M[k + 1:, k] / M[k, k], M[k, k:])
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (M[i, n] - M[i, i + 1:n] @ x[i + 1:]) / M[i, i]
    return x


def gram_condition(A) -> float:
    """2-norm condition number of ``A^T A`` from the singular values of ``A``."""
    s = np.linalg.svd(as_matrix(A, "A"), compute_uv=False)
    if s[-1] == 0.0:
        return math.inf
    return float((s[0] / s[-1]) ** 2)
