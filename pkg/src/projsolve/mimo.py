"""Seeded massive-MIMO uplink instances and the zero-forcing entry point.

An instance is a real IID N(0, 1) channel ``A`` (m receive antennas by n
users), a standard normal input ``x_true`` and the observation
``b = A x_true + sigma w``. The three draws come from separate Philox
streams keyed by the same seed (see :mod:`projsolve.rng`), so turning the
noise on or off leaves ``A`` and ``x_true`` unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from .baselines import (
    IterativeConfig,
    householder_qr_solve,
    lsmr_solve,
    lsqr_solve,
    normal_equations_oracle,
    randomized_kaczmarz,
)
from .errors import DimensionError, ProjsolveError, UnknownMethod
from .linalg import OpCounter, as_matrix, as_vector, norm2
from .solver import Solution, solve_all


def gen_channel(m: int, n: int, seed: int) -> np.ndarray:
    if m < 1 or n < 1:
        raise DimensionError(f"channel dimensions must be positive, got {m}x{n}")
    return _rng.philox(seed, _rng.CHANNEL).standard_normal((m, n))


def gen_input(n: int, seed: int) -> np.ndarray:
    if n < 1:
        raise DimensionError(f"input length must be positive, got {n}")
    return _rng.philox(seed, _rng.INPUT).standard_normal(n)


@dataclass
class ChannelInstance:
    seed: int
    m: int
    n: int
    A: np.ndarray = field(repr=False)
    x_true: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    noise_sigma: float = 0.0

    @classmethod
    def from_arrays(cls, A, x_true, b=None, seed=0, noise_sigma=0.0):
        """Wrap explicit arrays (``b`` defaults to ``A @ x_true``)."""
        A = as_matrix(A, "A")
        x_true = as_vector(x_true, "x_true")
        if x_true.size != A.shape[1]:
            raise DimensionError(f"x_true has length {x_true.size}, A has {A.shape[1]} columns")
        b = A @ x_true if b is None else as_vector(b, "b")
        return cls(seed=seed, m=A.shape[0], n=A.shape[1], A=A, x_true=x_true, b=b,
                   noise_sigma=noise_sigma)


def build_problem(m: int, n: int, seed: int, noise_sigma: float = 0.0) -> ChannelInstance:
    if m < n:
        raise DimensionError(f"need at least as many antennas as users, got m={m}, n={n}")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    A = gen_channel(m, n, seed)
    x_true = gen_input(n, seed)
    b = A @ x_true
    if noise_sigma > 0:
        b = b + noise_sigma * _rng.philox(seed, _rng.NOISE).standard_normal(m)
    return ChannelInstance(seed=seed, m=m, n=n, A=A, x_true=x_true, b=b, noise_sigma=noise_sigma)


def _proposed(A, b, opts):
    return solve_all(A, b, ratio_mode=opts.get("ratio_mode", "dot"))


def _oracle(A, b, opts):
    x = normal_equations_oracle(A, b)
    return Solution(x=x, residual_norm=norm2(A @ x - b), counter=OpCounter(), method="normal_oracle")


def _iterative(fn):
    def run(A, b, opts):
        cfg = opts.get("config") or IterativeConfig()
        return fn(A, b, cfg)
    return run


METHODS = {
    "proposed": _proposed,
    "householder_qr": lambda A, b, opts: householder_qr_solve(A, b),
    "kaczmarz": _iterative(randomized_kaczmarz),
    "lsqr": _iterative(lsqr_solve),
    "lsmr": _iterative(lsmr_solve),
    "normal_oracle": _oracle,
}

EXACT_METHODS = ("proposed", "householder_qr", "normal_oracle")


def solve_with(method: str, A, b, **options) -> Solution:
    """Run the named solver on explicit ``A``, ``b``."""
    try:
        solver = METHODS[method]
    except KeyError:
        raise UnknownMethod(method, tuple(METHODS)) from None
    sol = solver(A, b, options)
    sol.method = method
    return sol


def zf_estimate(instance: ChannelInstance, method: str = "proposed", **options) -> Solution:
    """Zero-forcing estimate of ``x_true`` with the named solver.

    Options: ``ratio_mode`` for ``proposed``; ``config`` (an
    :class:`IterativeConfig`) for the iterative methods. The returned
    solution carries the residual and the error against ``x_true``. Solver
    failures are re-raised with the instance seed appended to the message.
    """
    if method not in METHODS:
        raise UnknownMethod(method, tuple(METHODS))
    try:
        sol = solve_with(method, instance.A, instance.b, **options)
    except ProjsolveError as exc:
        msg = exc.args[0] if exc.args else str(exc)
        exc.args = (f"{msg} [instance seed {instance.seed}]",) + exc.args[1:]
        exc.seed = instance.seed
        raise
    sol.error_norm = norm2(sol.x - instance.x_true)
    return sol
