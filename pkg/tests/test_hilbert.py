import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbitsamp.hilbert import (
    CrossCorrelation,
    DimensionMismatch,
    LinearOperator,
    PowerBoundExceeded,
    apply_power,
    cross_correlation,
    gram_matrix,
    inner,
)


def cyclic_shift(n):
    return LinearOperator(np.roll(np.eye(n), 1, axis=0))


def random_well_conditioned(rng, n, scale=0.3):
    m = np.eye(n) + scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return LinearOperator(m)


class TestLinearOperator:
    def test_rejects_singular(self):
        with pytest.raises(ValueError):
            LinearOperator(np.zeros((3, 3)))

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            LinearOperator(np.ones((2, 3)))

    def test_inverse_cached(self):
        rng = np.random.default_rng(0)
        op = random_well_conditioned(rng, 4)
        assert np.max(np.abs(op.inv_matrix @ op.matrix - np.eye(4))) < 1e-10

    def test_power_bound(self):
        op = cyclic_shift(3)
        with pytest.raises(PowerBoundExceeded):
            op.power(op.max_power + 1)


class TestApplyPower:
    def test_identity_any_power(self):
        op = LinearOperator(np.eye(4))
        v = np.arange(4) + 1j
        assert np.allclose(apply_power(op, 5, v), v)

    def test_shift_full_cycle(self):
        op = cyclic_shift(3)
        d0 = np.eye(3)[0]
        assert np.allclose(apply_power(op, 3, d0), d0)
        assert np.allclose(apply_power(op, 1, d0), np.eye(3)[1])

    def test_negative_power_matches_solve(self):
        rng = np.random.default_rng(1)
        op = random_well_conditioned(rng, 4)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        got = apply_power(op, -2, v)
        # oracle: solve T^2 w = v directly
        w = np.linalg.solve(op.matrix @ op.matrix, v)
        assert np.max(np.abs(got - w)) < 1e-10

    def test_dimension_mismatch(self):
        op = cyclic_shift(3)
        with pytest.raises(DimensionMismatch):
            apply_power(op, 1, np.ones(4))


class TestCrossCorrelation:
    def test_orthonormal_shift_orbit(self):
        op = cyclic_shift(3)
        d0 = np.eye(3)[0]
        cc = cross_correlation(op, d0, d0, range(-3, 7))
        for k in range(-3, 7):
            expected = 1.0 if k % 3 == 0 else 0.0
            assert abs(cc.at(k) - expected) < 1e-12

    def test_shifted_sampler(self):
        op = cyclic_shift(4)
        e = np.eye(4)
        cc = cross_correlation(op, e[0], e[1], range(0, 8))
        for k in range(8):
            assert abs(cc.at(k) - (1.0 if k % 4 == 1 else 0.0)) < 1e-12

    def test_matches_double_application(self):
        rng = np.random.default_rng(2)
        op = random_well_conditioned(rng, 3)
        a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        b = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        cc = cross_correlation(op, a, b, range(0, 3))
        oracle = inner(op.matrix @ (op.matrix @ a), b)
        assert abs(cc.at(2) - oracle) < 1e-12

    def test_periodic_lookup(self):
        op = cyclic_shift(3)
        d0 = np.eye(3)[0]
        cc = cross_correlation(op, d0, d0, range(0, 3), period=3)
        assert cc.at(300) == cc.at(0)
        assert cc.at(-1) == cc.at(2)

    def test_inconsistent_period_rejected(self):
        with pytest.raises(ValueError):
            CrossCorrelation(k_start=0, values=np.array([1.0, 2.0, 3.0]), period=2)


class TestGramMatrix:
    def test_orthonormal_basis(self):
        assert np.allclose(gram_matrix(list(np.eye(3))), np.eye(3))

    def test_repeated_vector_singular(self):
        d0 = np.eye(2)[0]
        g = gram_matrix([d0, d0])
        assert np.allclose(g, np.ones((2, 2)))
        assert abs(np.linalg.det(g)) < 1e-14

    def test_rank_matches_svd_oracle(self):
        rng = np.random.default_rng(3)
        op = random_well_conditioned(rng, 4)
        a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        orbit = [apply_power(op, k, a) for k in range(4)]
        g = gram_matrix(orbit)
        sv = np.linalg.svd(np.column_stack(orbit), compute_uv=False)
        rank = int(np.sum(sv > 1e-10 * sv[0]))
        eig = np.linalg.eigvalsh(g)
        gram_rank = int(np.sum(eig > 1e-20 * eig[-1]))
        assert gram_rank == rank

    def test_convention_conjugate_linear_second(self):
        v = np.array([1.0 + 1j, 0])
        w = np.array([2.0, 0])
        g = gram_matrix([v, w])
        # entry (0, 1) = <w, v>
        assert g[0, 1] == inner(w, v)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), dim=st.integers(2, 5))
def test_adjoint_consistency(seed, dim):
    rng = np.random.default_rng(seed)
    op = random_well_conditioned(rng, dim)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    w = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    lhs = inner(op.matrix @ v, w)
    rhs = inner(v, op.adjoint @ w)
    scale = np.linalg.norm(v) * np.linalg.norm(w) * np.linalg.norm(op.matrix, 2)
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    k1=st.integers(-8, 8),
    k2=st.integers(-8, 8),
)
def test_power_group_law(seed, k1, k2):
    rng = np.random.default_rng(seed)
    op = random_well_conditioned(rng, 3, scale=0.2)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    lhs = apply_power(op, k1, apply_power(op, k2, v))
    rhs = apply_power(op, k1 + k2, v)
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.linalg.norm(rhs))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 6))
def test_periodicity_detection(seed, n):
    # T^n a = a forces an n-periodic correlation sequence
    rng = np.random.default_rng(seed)
    op = cyclic_shift(n)
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    cc = cross_correlation(op, a, b, range(0, 2 * n))
    for k in range(n):
        assert abs(cc.at(k) - cc.at(k + n)) < 1e-10
