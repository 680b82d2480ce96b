"""Least squares by sequential rank-one projections.

Columns of ``A`` are eliminated one at a time. Each eliminated (already
reduced) column ``q`` defines the projector ``I - q q^T / (q^T q)``, which is
applied to every remaining column and to the right-hand side. After all
columns but ``k`` are gone, the surviving column is orthogonal to every other
column of ``A`` and the k-th unknown is a single ratio of two inner products.

The coefficients produced along the way (``rho`` for columns, ``beta`` for the
right-hand side) are kept in a :class:`CoefficientLedger`, which is an
unnormalized modified Gram-Schmidt factorization ``A = Q U``. Back
substitution through the ledger recovers the remaining unknowns in O(n^2).

Column indices are 0-based throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SingularPivot, SizeGuardError, ZeroDenominator
from .linalg import (
    OpCounter,
    PivotProjector,
    as_matrix,
    as_vector,
    max_column_norm,
    norm2,
    singularity_floor,
)

RATIO_MODES = ("dot", "sum")
SUM_CANCEL_RTOL = 1e-12
C_MATRIX_LIMIT = 128


@dataclass
class EliminationRecord:
    """One elimination stage.

    ``q`` is the pivot column as it stood when eliminated, ``rho[j]`` the
    coefficient ``q^T a_j / q^T q`` for every column ``j`` still active at that
    point and ``beta`` the same coefficient for the right-hand side.
    """

    pivot: int
    q: np.ndarray
    gram: float
    rho: dict[int, float]
    beta: float


@dataclass
class CoefficientLedger:
    records: list[EliminationRecord]
    kept_index: int
    kept_column: np.ndarray
    kept_rhs: np.ndarray

    @property
    def elimination_order(self) -> list[int]:
        return [r.pivot for r in self.records]


@dataclass
class QrFactors:
    """``Q`` has the reduced pivots as columns (at their original indices).

    ``T = Q^T A`` is triangular, ``D`` holds ``q_p^T q_p`` and ``U`` is the unit
    triangular coefficient matrix with ``A = Q U``.
    """

    Q: np.ndarray
    T: np.ndarray
    D: np.ndarray
    U: np.ndarray
    order: list[int]
    direction: str


@dataclass
class Solution:
    x: np.ndarray
    residual_norm: float
    counter: OpCounter = field(default_factory=OpCounter)
    error_norm: float | None = None
    method: str | None = None
    iterations: int | None = None


def _check_system(A, b):
    A = as_matrix(A, "A", tall=True)
    b = as_vector(b, "b")
    if b.size != A.shape[0]:
        raise DimensionError(f"A has {A.shape[0]} rows but b has length {b.size}")
    return A, b


def _check_index(k, n):
    if not 0 <= k < n:
        raise IndexError(f"column index {k} out of range for {n} columns")
    return int(k)


def eliminate_column(A_active, b_active, j, counter=None, scale=None, columns=None):
    """Remove column ``j`` of ``A_active`` and project everything else off it.

    ``columns`` maps positions in ``A_active`` to original column indices
    (identity when omitted); the record's ``pivot`` and ``rho`` keys use the
    original indices. ``scale`` sets the singularity floor and defaults to the
    largest column norm of ``A_active``.

    Returns ``(A_next, b_next, record)``.
    """
    A_active = np.asarray(A_active, dtype=np.float64)
    b_active = np.asarray(b_active, dtype=np.float64)
    m, ncols = A_active.shape
    if b_active.shape != (m,):
        raise DimensionError(f"b has shape {b_active.shape}, expected ({m},)")
    if columns is None:
        columns = list(range(ncols))
    if scale is None:
        scale = max_column_norm(A_active)
    j = _check_index(j, ncols)

    proj = PivotProjector(A_active[:, j], scale=scale, index=columns[j], counter=counter)
    q, gram = proj.a.copy(), proj.gram
    rest = np.delete(A_active, j, axis=1)
    rest_cols = columns[:j] + columns[j + 1:]

    # one row of inner products, then a single rank-one update
    rho = (q @ rest) / gram
    rest -= np.outer(q, rho)
    beta = float(q @ b_active) / gram
    b_next = b_active - beta * q
    if counter is not None:
        counter.add("pivot_dot_mults", m * rest.shape[1])
        counter.add("normalization_ops", rest.shape[1] + 1)
        counter.add("update_mults", m * rest.shape[1])
        counter.add("aux_mults", 2 * m)

    record = EliminationRecord(
        pivot=columns[j], q=q, gram=gram,
        rho={c: float(r) for c, r in zip(rest_cols, rho)}, beta=beta,
    )
    return rest, b_next, record


def default_order(n, k):
    """Descending column order with ``k`` left out."""
    return [p for p in range(n - 1, -1, -1) if p != k]


def reduce(A, b, k=0, counter=None, order=None):
    """Eliminate every column except ``k`` and return the coefficient ledger.

    ``order`` overrides the elimination order (it must list every column
    except ``k`` exactly once); the default is descending index.
    """
    A, b = _check_system(A, b)
    m, n = A.shape
    k = _check_index(k, n)
    if order is None:
        order = default_order(n, k)
    elif sorted(order) != default_order(n, k)[::-1]:
        raise ValueError(f"order must list every column except {k} exactly once")

    scale = max_column_norm(A)
    work, rhs = A, b
    columns = list(range(n))
    records = []
    for p in order:
        work, rhs, rec = eliminate_column(work, rhs, columns.index(p), counter,
                                          scale=scale, columns=columns)
        columns.remove(p)
        records.append(rec)
    return CoefficientLedger(records=records, kept_index=k,
                             kept_column=work[:, 0].copy(), kept_rhs=rhs)


def ratio_dot(a_red, b_red, counter=None, scale=None, index=None) -> float:
    """``(a^T b) / (a^T a)`` on fully reduced quantities."""
    a_red = np.asarray(a_red, dtype=np.float64)
    b_red = np.asarray(b_red, dtype=np.float64)
    if a_red.shape != b_red.shape:
        raise DimensionError(f"cannot take ratio of shapes {a_red.shape} and {b_red.shape}")
    gram = float(a_red @ a_red)
    floor = singularity_floor(scale) if scale is not None else 0.0
    if not gram > floor:
        raise SingularPivot(index, gram, floor)
    if counter is not None:
        counter.add("aux_mults", 2 * a_red.size)
        counter.add("normalization_ops", 1)
    return float(a_red @ b_red) / gram


def ratio_sum(a_red, b_red, counter=None) -> float:
    """``sum(b) / sum(a)``; valid only when ``b_red`` is parallel to ``a_red``."""
    a_red = np.asarray(a_red, dtype=np.float64)
    b_red = np.asarray(b_red, dtype=np.float64)
    if a_red.shape != b_red.shape:
        raise DimensionError(f"cannot take ratio of shapes {a_red.shape} and {b_red.shape}")
    den = float(np.sum(a_red))
    if not abs(den) > SUM_CANCEL_RTOL * float(np.sum(np.abs(a_red))):
        raise ZeroDenominator(f"components of the reduced column cancel (sum = {den:.3e})")
    if counter is not None:
        counter.add("normalization_ops", 1)
    return float(np.sum(b_red)) / den


def _ratio(ledger, mode, counter, scale):
    if mode == "dot":
        return ratio_dot(ledger.kept_column, ledger.kept_rhs, counter, scale=scale,
                         index=ledger.kept_index)
    if mode == "sum":
        return ratio_sum(ledger.kept_column, ledger.kept_rhs, counter)
    raise ValueError(f"ratio_mode must be one of {RATIO_MODES}, got {mode!r}")


def solve_single(A, b, k, ratio_mode="dot"):
    """Compute only the k-th unknown. Returns ``(x_k, counter)``."""
    counter = OpCounter()
    A, b = _check_system(A, b)
    ledger = reduce(A, b, k, counter)
    return _ratio(ledger, ratio_mode, counter, max_column_norm(A)), counter


def back_substitute(ledger, x_kept, n, counter=None) -> np.ndarray:
    """Recover all unknowns from the ledger once the kept one is known."""
    x = np.zeros(n)
    x[ledger.kept_index] = x_kept
    for rec in reversed(ledger.records):
        # every column active at this stage was eliminated later, so it is solved
        acc = rec.beta
        for j, r in rec.rho.items():
            acc -= r * x[j]
        x[rec.pivot] = acc
        if counter is not None:
            counter.add("backsub_mults", len(rec.rho))
    return x


def solve_all(A, b, ratio_mode="dot") -> Solution:
    """Full least-squares solve: one reduction plus ledger back substitution."""
    A, b = _check_system(A, b)
    n = A.shape[1]
    counter = OpCounter()
    ledger = reduce(A, b, 0, counter)
    x0 = _ratio(ledger, ratio_mode, counter, max_column_norm(A))
    x = back_substitute(ledger, x0, n, counter)
    return Solution(x=x, residual_norm=norm2(A @ x - b), counter=counter, method="proposed")


_DIRECTIONS = {"last": "last", "last-to-first": "last", "first": "first", "first-to-last": "first"}


def extract_qr(A, direction="last", counter=None) -> QrFactors:
    """Orthogonal factor from one complete elimination pass.

    ``direction="last"`` eliminates from the last column backwards and gives a
    lower triangular ``T = Q^T A``; ``"first"`` gives an upper triangular one.
    """
    try:
        direction = _DIRECTIONS[direction]
    except KeyError:
        raise ValueError(f"direction must be 'last' or 'first', got {direction!r}") from None
    A = as_matrix(A, "A", tall=True)
    m, n = A.shape
    if direction == "last":
        order, kept = list(range(n - 1, 0, -1)), 0
    else:
        order, kept = list(range(0, n - 1)), n - 1
    ledger = reduce(A, np.zeros(m), kept, counter, order=order)
    scale = max_column_norm(A)
    gram = float(ledger.kept_column @ ledger.kept_column)
    if not gram > singularity_floor(scale):
        raise SingularPivot(kept, gram, singularity_floor(scale))

    Q = np.zeros((m, n))
    U = np.eye(n)
    D = np.zeros(n)
    for rec in ledger.records:
        Q[:, rec.pivot] = rec.q
        D[rec.pivot] = rec.gram
        for j, r in rec.rho.items():
            U[rec.pivot, j] = r
    Q[:, kept] = ledger.kept_column
    D[kept] = gram
    return QrFactors(Q=Q, T=Q.T @ A, D=D, U=U, order=order + [kept], direction=direction)


def inverse_vector(A, k=0) -> np.ndarray:
    """Column ``k`` with its components along every other column removed."""
    A = as_matrix(A, "A", tall=True)
    ledger = reduce(A, np.zeros(A.shape[0]), k)
    scale = max_column_norm(A)
    gram = float(ledger.kept_column @ ledger.kept_column)
    if not gram > singularity_floor(scale):
        raise SingularPivot(k, gram, singularity_floor(scale))
    return ledger.kept_column


def build_c_matrix(A, k) -> np.ndarray:
    """Dense product of the projectors for every column except ``k``.

    Built independently of :func:`reduce`: each projector is formed from the
    original column pushed through the dense product of the earlier ones, and
    the product is accumulated as an explicit ``m x m`` matrix. Test support.
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    if m > C_MATRIX_LIMIT:
        raise SizeGuardError(f"refusing to build a {m}x{m} C matrix (limit {C_MATRIX_LIMIT})")
    k = _check_index(k, n)
    scale = max_column_norm(A)
    C = np.eye(m)
    for p in default_order(n, k):
        v = C @ A[:, p]
        vv = float(v @ v)
        if not vv > singularity_floor(scale):
            raise SingularPivot(p, vv, singularity_floor(scale))
        R = np.eye(m) - np.outer(v, v) / vv
        C = R @ C
    return C
