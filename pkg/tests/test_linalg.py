import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from projsolve.errors import DimensionError, NonFiniteError, SingularPivot, SizeGuardError
from projsolve.linalg import (
    OpCounter,
    PivotProjector,
    apply_projector,
    as_matrix,
    as_vector,
    dot,
    materialize_projector,
    norm2,
    project_columns,
)


def dense_projector(a):
    # independent of PivotProjector: built from the textbook formula
    a = np.asarray(a, dtype=float)
    return np.eye(a.size) - np.outer(a, a) / (a @ a)


@pytest.mark.parametrize("u, v, expected", [
    ([1, 0], [3, 4], 3.0),
    ([2, 2], [2, 2], 8.0),
    ([1, 2, 3], [4, 5, 6], 1 * 4 + 2 * 5 + 3 * 6),
])
def test_dot(u, v, expected):
    c = OpCounter()
    assert dot(u, v, c, "aux_mults") == expected
    assert c.aux_mults == len(u)
    assert c.pivot_dot_mults == 0


def test_dot_length_mismatch():
    with pytest.raises(DimensionError):
        dot([1, 2], [1, 2, 3])


def test_dot_unknown_category():
    with pytest.raises(ValueError):
        dot([1.0], [1.0], OpCounter(), "flops")


def test_apply_projector_examples():
    c = OpCounter()
    out = apply_projector(PivotProjector([1, 0]), [3, 4], c)
    np.testing.assert_array_equal(out, [0, 4])
    assert (c.pivot_dot_mults, c.update_mults, c.normalization_ops) == (2, 2, 1)

    expected = dense_projector([1, 1]) @ np.array([2.0, 0.0])
    np.testing.assert_allclose(expected, [1, -1])
    np.testing.assert_allclose(apply_projector(PivotProjector([1, 1]), [2, 0]), expected, atol=1e-15)


def test_apply_projector_kills_pivot():
    a = np.array([0.3, -1.7, 2.2, 5.0])
    assert norm2(apply_projector(PivotProjector(a), a)) <= 1e-15 * norm2(a)


def test_apply_projector_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply_projector(PivotProjector([1, 0]), [1, 2, 3])


def test_project_columns_examples():
    np.testing.assert_array_equal(project_columns(PivotProjector([0, 1]), np.eye(2)),
                                  [[1, 0], [0, 0]])

    a = np.array([1.0, -2.0, 0.5])
    M = np.column_stack([a, a, a])
    np.testing.assert_allclose(project_columns(PivotProjector(a), M), 0, atol=1e-15)

    M = np.array([[1.0, 1.0], [0.0, 1.0]])
    expected = dense_projector([1, 1]) @ M
    np.testing.assert_allclose(expected, [[0.5, 0], [-0.5, 0]])
    c = OpCounter()
    np.testing.assert_allclose(project_columns(PivotProjector([1, 1]), M, c), expected, atol=1e-15)
    assert c.pivot_dot_mults == 2 * 2


def test_project_columns_matches_apply_projector():
    rng = np.random.default_rng(0)
    a = rng.standard_normal(7)
    M = rng.standard_normal((7, 4))
    p = PivotProjector(a)
    cols = np.column_stack([apply_projector(p, M[:, j]) for j in range(4)])
    np.testing.assert_allclose(project_columns(p, M), cols, atol=1e-14)


def test_materialize_examples():
    np.testing.assert_array_equal(materialize_projector(PivotProjector([1, 0])), [[0, 0], [0, 1]])
    np.testing.assert_allclose(materialize_projector(PivotProjector([1, 1])),
                               [[0.5, -0.5], [-0.5, 0.5]])
    R = materialize_projector(PivotProjector([0.2, -1.0, 3.0]))
    np.testing.assert_allclose(R @ R, R, atol=1e-14)
    np.testing.assert_allclose(R, R.T)


def test_materialize_guard():
    with pytest.raises(SizeGuardError):
        materialize_projector(PivotProjector(np.ones(513)))


@pytest.mark.parametrize("v, expected", [([3, 4], 5.0), ([0, 0, 0], 0.0), ([1, 1, 1, 1], 2.0)])
def test_norm2(v, expected):
    assert norm2(v) == expected


def test_norm2_extreme_scales():
    # squaring 3e-200 or 3e200 would under/overflow without scaling
    assert norm2([3e-200, 4e-200]) == pytest.approx(5e-200, rel=1e-15)
    assert norm2([3e200, 4e200]) == pytest.approx(5e200, rel=1e-15)
    assert norm2([7.14741579e-233]) == 7.14741579e-233


def test_projector_rejects_zero_and_tiny_pivots():
    with pytest.raises(SingularPivot):
        PivotProjector([0.0, 0.0])
    with pytest.raises(SingularPivot) as info:
        PivotProjector([1e-14, 0.0], scale=10.0, index=3)
    assert info.value.column == 3
    PivotProjector([1e-10, 0.0], scale=10.0)


def test_validation():
    with pytest.raises(NonFiniteError):
        as_vector([1.0, np.nan])
    with pytest.raises(NonFiniteError):
        as_matrix([[1.0, np.inf]])
    with pytest.raises(DimensionError):
        as_vector([])
    with pytest.raises(DimensionError):
        as_matrix([[1.0, 2.0]], tall=True)


def test_counter_is_monotone_and_deterministic():
    c = OpCounter()
    with pytest.raises(ValueError):
        c.add("aux_mults", -1)
    rng = np.random.default_rng(1)
    counts = []
    for _ in range(2):
        c = OpCounter()
        p = PivotProjector(rng.standard_normal(9), counter=c)
        project_columns(p, rng.standard_normal((9, 5)), c)
        apply_projector(p, rng.standard_normal(9), c)
        counts.append(c.as_dict())
    assert counts[0] == counts[1]
    assert counts[0]["total_mults"] == 9 + 2 * 45 + 5 + 2 * 9 + 1


# --- seeded invariants (counts as stated for the projector properties) ---

def _pairs(seed, trials):
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        m = int(rng.integers(1, 65))
        yield rng.standard_normal(m) * 10.0 ** rng.uniform(-3, 3), rng.standard_normal(m)


def test_annihilation_1000_trials():
    for a, _ in _pairs(10, 1000):
        assert norm2(apply_projector(PivotProjector(a), a)) <= 1e-13 * norm2(a)


def test_idempotence_contraction_orthogonality():
    for a, v in _pairs(11, 1000):
        p = PivotProjector(a)
        rv = apply_projector(p, v)
        assert norm2(apply_projector(p, rv) - rv) <= 1e-13 * norm2(v)
        assert norm2(rv) <= norm2(v) * (1 + 1e-12)
        assert abs(a @ rv) <= 1e-12 * norm2(a) * norm2(v)


def test_implicit_matches_materialized():
    for a, v in _pairs(12, 300):
        p = PivotProjector(a)
        dense = materialize_projector(p) @ v
        assert norm2(apply_projector(p, v) - dense) <= 1e-13 * max(norm2(v), 1e-300)


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 32).flatmap(
    lambda m: st.tuples(arrays(np.float64, m, elements=finite), arrays(np.float64, m, elements=finite))))
def test_projector_properties_hypothesis(av):
    a, v = av
    if a @ a < 1e-6:
        return
    p = PivotProjector(a)
    rv = apply_projector(p, v)
    nv = norm2(v)
    assert norm2(rv) <= nv * (1 + 1e-12) + 1e-300
    assert norm2(apply_projector(p, rv) - rv) <= 1e-12 * nv + 1e-300
    assert abs(a @ rv) <= 1e-12 * norm2(a) * nv + 1e-300
