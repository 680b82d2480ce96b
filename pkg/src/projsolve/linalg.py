"""Dense vectors, rank-one projectors and operation counting.

Vectors and matrices are plain ``float64`` numpy arrays; :func:`as_vector`
and :func:`as_matrix` validate them at API boundaries. A projector
``R = I - a a^T / (a^T a)`` is never formed explicitly except by
:func:`materialize_projector`, which exists for small test oracles.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import DimensionError, NonFiniteError, SingularPivot, SizeGuardError

#: Relative singularity floor: a pivot ``a`` is rejected when
#: ``||a|| < SINGULARITY_RTOL * scale`` (scale = largest column norm of the problem).
SINGULARITY_RTOL = 1e-12

MATERIALIZE_LIMIT = 512


def as_vector(v, name="vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return arr


def as_matrix(A, name="matrix", tall=False) -> np.ndarray:
    """Validate a dense matrix; with ``tall=True`` also require ``m >= n``."""
    arr = np.asarray(A, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-d array, got shape {arr.shape}")
    if tall and arr.shape[0] < arr.shape[1]:
        raise DimensionError(f"{name} must have at least as many rows as columns, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return arr


def norm2(v) -> float:
    """Euclidean norm, scaled so tiny or huge entries do not under/overflow."""
    v = np.asarray(v, dtype=np.float64)
    s = float(np.max(np.abs(v))) if v.size else 0.0
    if s == 0.0 or not np.isfinite(s):
        return s
    return s * float(np.linalg.norm(v / s))


def max_column_norm(A) -> float:
    return float(np.max(np.linalg.norm(A, axis=0)))


def singularity_floor(scale: float) -> float:
    """Smallest admissible squared pivot norm for a problem of the given scale."""
    return (SINGULARITY_RTOL * scale) ** 2


@dataclass
class OpCounter:
    """Tallies of arithmetic operations for one solve.

    Additions are not counted. ``normalization_ops`` holds divisions; every
    other field holds multiplications:

    pivot_dot_mults
        inner products of a pivot with the columns of the working matrix
    update_mults
        rank-one column updates ``a_j -= rho * q``
    backsub_mults
        substitution of already solved unknowns
    aux_mults
        everything else (pivot norms, right-hand-side projection, final ratio)
    """

    pivot_dot_mults: int = 0
    update_mults: int = 0
    normalization_ops: int = 0
    backsub_mults: int = 0
    aux_mults: int = 0

    def add(self, category: str, amount: int) -> None:
        if amount < 0:
            raise ValueError("operation counts only grow")
        setattr(self, category, getattr(self, category) + int(amount))

    @property
    def total_mults(self) -> int:
        """All multiplicative work, divisions included."""
        return sum(getattr(self, f.name) for f in fields(self))

    def snapshot(self) -> "OpCounter":
        return OpCounter(**asdict(self))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["total_mults"] = self.total_mults
        return d


def _check_category(category):
    if category not in OpCounter.__dataclass_fields__:
        raise ValueError(f"unknown counter category {category!r}")


def dot(u, v, counter: OpCounter | None = None, category: str = "pivot_dot_mults") -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise DimensionError(f"cannot dot shapes {u.shape} and {v.shape}")
    if counter is not None:
        _check_category(category)
        counter.add(category, u.size)
    return float(u @ v)


class PivotProjector:
    """Implicit projector onto the hyperplane orthogonal to ``a``.

    ``scale`` sets the singularity floor (typically the largest column norm
    of the problem being solved); ``index`` is only used in error messages.
    """

    __slots__ = ("a", "gram", "index")

    def __init__(self, a, scale: float | None = None, index=None, counter: OpCounter | None = None):
        a = as_vector(a, "pivot")
        gram = float(a @ a)
        if counter is not None:
            counter.add("aux_mults", a.size)
        floor = singularity_floor(scale) if scale is not None else 0.0
        if not gram > floor:
            raise SingularPivot(index, gram, floor)
        self.a = a
        self.gram = gram
        self.index = index

    def __len__(self):
        return self.a.size

    def __repr__(self):
        return f"PivotProjector(m={self.a.size}, gram={self.gram:.6g})"


def apply_projector(p: PivotProjector, v, counter: OpCounter | None = None,
                    dot_category: str = "pivot_dot_mults",
                    update_category: str = "update_mults") -> np.ndarray:
    """Return ``v - a (a^T v) / (a^T a)``."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != p.a.shape:
        raise DimensionError(f"projector of length {p.a.size} applied to shape {v.shape}")
    coef = (p.a @ v) / p.gram
    if counter is not None:
        m = p.a.size
        counter.add(dot_category, m)
        counter.add("normalization_ops", 1)
        counter.add(update_category, m)
    return v - coef * p.a


def project_columns(p: PivotProjector, M, counter: OpCounter | None = None) -> np.ndarray:
    """Apply the projector to every column of ``M`` (one rank-one update)."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != p.a.size:
        raise DimensionError(f"projector of length {p.a.size} applied to shape {M.shape}")
    coefs = (p.a @ M) / p.gram
    if counter is not None:
        m, n = M.shape
        counter.add("pivot_dot_mults", m * n)
        counter.add("normalization_ops", n)
        counter.add("update_mults", m * n)
    return M - np.outer(p.a, coefs)


def materialize_projector(p: PivotProjector) -> np.ndarray:
    """Dense ``I - a a^T / (a^T a)``; test support only."""
    m = p.a.size
    if m > MATERIALIZE_LIMIT:
        raise SizeGuardError(f"refusing to materialize a {m}x{m} projector (limit {MATERIALIZE_LIMIT})")
    return np.eye(m) - np.outer(p.a, p.a) / p.gram
