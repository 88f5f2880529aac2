import numpy as np
import pytest

from orbitsamp.cyclic import (
    CyclicSubspaceSpec,
    RankDeficiencyError,
    LeftInverseError,
    SamplingScheme,
    build_sample_matrix,
    check_rank,
    filter_bank_coefficients,
    is_r_circulant,
    project_onto_subspace,
    reconstruct,
    reconstruction_vectors,
    structurize_left_inverse,
    take_samples,
)
from orbitsamp.hilbert import LinearOperator, inner
from orbitsamp.instances import (
    CyclicInstanceConfig,
    operator_with_orders,
    random_cyclic_instance,
)


def shift_spec(n):
    op = LinearOperator(np.roll(np.eye(n), 1, axis=0))
    return CyclicSubspaceSpec(operator=op, generators=[np.eye(n)[0]], orders=[n])


def oracle_sample_matrix(spec, scheme):
    """Independent path: entries as direct inner products <T^k a_l, (T*)^{-rn} b_j>."""
    op = spec.operator
    adj_inv = np.linalg.inv(op.matrix.conj().T)
    rows = []
    for b in scheme.samplers:
        for n in range(scheme.ell):
            analyzer = np.linalg.matrix_power(adj_inv, scheme.r * n) @ b
            row = []
            for a, Nl in zip(spec.generators, spec.orders):
                v = a.copy()
                for _ in range(Nl):
                    row.append(inner(v, analyzer))
                    v = op.matrix @ v
            rows.append(row)
    return np.array(rows)


class TestBuildSampleMatrix:
    def test_undersampled_shift(self):
        # s = 1 < r = 2 cannot reach full rank
        spec = shift_spec(4)
        scheme = SamplingScheme.for_spec(spec, [np.eye(4)[0]], 2)
        R = build_sample_matrix(spec, scheme)
        expected = np.array([[1, 0, 0, 0], [0, 0, 1, 0]], dtype=complex)
        assert np.allclose(R.matrix, expected)
        assert not check_rank(R).full_rank
        assert check_rank(R).rank == 2

    def test_two_sampler_permutation(self):
        spec = shift_spec(4)
        e = np.eye(4)
        scheme = SamplingScheme.for_spec(spec, [e[0], e[1]], 2)
        R = build_sample_matrix(spec, scheme)
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[1, 2] = expected[2, 1] = expected[3, 3] = 1
        assert np.allclose(R.matrix, expected)
        assert check_rank(R).full_rank

    def test_orthonormal_orbit_identity(self):
        spec = shift_spec(5)
        scheme = SamplingScheme.for_spec(spec, [np.eye(5)[0]], 1)
        R = build_sample_matrix(spec, scheme)
        assert np.allclose(R.matrix, np.eye(5))

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_inner_product_oracle(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig(max_dim=14, distortion=0.2))
        oracle = oracle_sample_matrix(inst.spec, inst.scheme)
        assert np.max(np.abs(inst.sample_matrix.matrix - oracle)) < 1e-9

    def test_r_must_divide(self):
        spec = shift_spec(4)
        with pytest.raises(ValueError):
            SamplingScheme.for_spec(spec, [np.eye(4)[0]], 3)


class TestTakeSamples:
    def test_generator_sample(self):
        spec = shift_spec(5)
        scheme = SamplingScheme.for_spec(spec, [np.eye(5)[0]], 1)
        samples = take_samples(spec, scheme, spec.generators[0])
        expected = np.zeros(5)
        expected[0] = 1
        assert np.allclose(samples, expected)

    def test_shifted_generator_sample(self):
        spec = shift_spec(5)
        scheme = SamplingScheme.for_spec(spec, [np.eye(5)[0]], 1)
        a = spec.generators[0]
        x = spec.operator.matrix @ a
        samples = take_samples(spec, scheme, x)
        R = build_sample_matrix(spec, scheme)
        alpha = np.zeros(5)
        alpha[1] = 1
        assert np.allclose(samples, R.matrix @ alpha)

    @pytest.mark.parametrize("seed", [3, 4, 5])
    def test_equals_matrix_action(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig(distortion=0.2))
        spec, scheme, R = inst.spec, inst.scheme, inst.sample_matrix
        alpha = rng.standard_normal(spec.total_order) + 1j * rng.standard_normal(
            spec.total_order
        )
        x = spec.synthesize(alpha)
        samples = take_samples(spec, scheme, x)
        assert np.max(np.abs(samples - R.matrix @ alpha)) < 1e-10 * np.linalg.norm(alpha)


class TestCheckRank:
    def test_permutation_singular_values(self):
        spec = shift_spec(4)
        e = np.eye(4)
        scheme = SamplingScheme.for_spec(spec, [e[0], e[1]], 2)
        report = check_rank(build_sample_matrix(spec, scheme))
        assert report.full_rank
        assert np.allclose(report.singular_values, 1.0)

    def test_frame_bound_sandwich(self):
        rng = np.random.default_rng(6)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig())
        R = inst.sample_matrix
        sv = check_rank(R).singular_values
        lo, hi = sv[-1] ** 2, sv[0] ** 2
        for _ in range(200):
            alpha = rng.standard_normal(R.cols) + 1j * rng.standard_normal(R.cols)
            q = np.linalg.norm(R.matrix @ alpha) ** 2 / np.linalg.norm(alpha) ** 2
            assert lo - 1e-9 <= q <= hi + 1e-9


class TestStructurizeLeftInverse:
    def test_identity_matrix(self):
        spec = shift_spec(5)
        scheme = SamplingScheme.for_spec(spec, [np.eye(5)[0]], 1)
        R = build_sample_matrix(spec, scheme)
        hs = structurize_left_inverse(R)
        assert np.allclose(hs.entries, np.eye(5))

    def test_square_equals_inverse(self):
        spec = shift_spec(4)
        e = np.eye(4)
        scheme = SamplingScheme.for_spec(spec, [e[0], e[1]], 2)
        R = build_sample_matrix(spec, scheme)
        hs = structurize_left_inverse(R)
        assert np.max(np.abs(hs.entries - np.linalg.inv(R.matrix))) < 1e-12

    def test_oversampled_single_generator(self):
        # N=12, r=3, s=5, ell=4: residual and exact column structure
        rng = np.random.default_rng(7)
        op, gens = operator_with_orders(rng, 12, [12])
        spec = CyclicSubspaceSpec(operator=op, generators=gens, orders=[12])
        samplers = [
            rng.standard_normal(12) + 1j * rng.standard_normal(12) for _ in range(5)
        ]
        scheme = SamplingScheme.for_spec(spec, samplers, 3)
        R = build_sample_matrix(spec, scheme)
        hs = structurize_left_inverse(R)
        assert hs.residual(R) <= 1e-10
        offs = hs.column_offsets()
        for j in range(hs.s):
            base = hs.first_column(j)
            for n in range(hs.ell):
                col = hs.entries[:, j * hs.ell + n]
                for l, Nl in enumerate(hs.orders):
                    seg = np.roll(base[offs[l] : offs[l + 1]], (hs.r * n) % Nl)
                    assert np.array_equal(col[offs[l] : offs[l + 1]], seg)

    def test_moore_penrose_axioms(self):
        rng = np.random.default_rng(8)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig())
        Rm = inst.sample_matrix.matrix
        pinv = np.linalg.pinv(Rm)
        assert np.max(np.abs(Rm @ pinv @ Rm - Rm)) < 1e-10
        assert np.max(np.abs(pinv @ Rm @ pinv - pinv)) < 1e-10

    def test_bad_seed_rejected(self):
        spec = shift_spec(4)
        e = np.eye(4)
        scheme = SamplingScheme.for_spec(spec, [e[0], e[1]], 2)
        R = build_sample_matrix(spec, scheme)
        with pytest.raises(LeftInverseError):
            structurize_left_inverse(R, H=np.zeros((4, 4)))

    def test_rank_deficient_rejected(self):
        spec = shift_spec(4)
        scheme = SamplingScheme.for_spec(spec, [np.eye(4)[0]], 2)
        R = build_sample_matrix(spec, scheme)
        with pytest.raises(RankDeficiencyError):
            structurize_left_inverse(R)

    def test_u_family_member_still_left_inverse(self):
        rng = np.random.default_rng(9)
        op, gens = operator_with_orders(rng, 12, [12])
        spec = CyclicSubspaceSpec(operator=op, generators=gens, orders=[12])
        samplers = [
            rng.standard_normal(12) + 1j * rng.standard_normal(12) for _ in range(5)
        ]
        scheme = SamplingScheme.for_spec(spec, samplers, 3)
        R = build_sample_matrix(spec, scheme)
        U = 0.1 * (rng.standard_normal((12, 20)) + 1j * rng.standard_normal((12, 20)))
        hs = structurize_left_inverse(R, U=U)
        assert hs.residual(R) <= 1e-10


class TestReconstruction:
    def test_orthonormal_case_returns_generator(self):
        spec = shift_spec(5)
        scheme = SamplingScheme.for_spec(spec, [np.eye(5)[0]], 1)
        R = build_sample_matrix(spec, scheme)
        basis = reconstruction_vectors(spec, structurize_left_inverse(R))
        assert np.allclose(basis.vectors[0], spec.generators[0])

    def test_interpolation_property_square(self):
        rng = np.random.default_rng(10)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig(square=True))
        spec, scheme, R = inst.spec, inst.scheme, inst.sample_matrix
        assert R.rows == R.cols
        basis = reconstruction_vectors(spec, structurize_left_inverse(R))
        for j, c in enumerate(basis.vectors):
            samples = take_samples(spec, scheme, c)
            target = np.zeros(scheme.s * scheme.ell)
            target[j * scheme.ell] = 1.0
            assert np.max(np.abs(samples - target)) < 1e-10

    @pytest.mark.parametrize("seed", [11, 12, 13, 14])
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_cyclic_instance(
            rng, CyclicInstanceConfig(distortion=0.2 if seed % 2 else 0.0)
        )
        spec, scheme, R = inst.spec, inst.scheme, inst.sample_matrix
        basis = reconstruction_vectors(spec, structurize_left_inverse(R))
        alpha = rng.standard_normal(spec.total_order) + 1j * rng.standard_normal(
            spec.total_order
        )
        x = spec.synthesize(alpha)
        xr = reconstruct(spec, scheme, basis, take_samples(spec, scheme, x))
        assert np.linalg.norm(xr - x) <= 1e-8 * np.linalg.norm(x)

    def test_sample_length_checked(self):
        spec = shift_spec(4)
        e = np.eye(4)
        scheme = SamplingScheme.for_spec(spec, [e[0], e[1]], 2)
        R = build_sample_matrix(spec, scheme)
        basis = reconstruction_vectors(spec, structurize_left_inverse(R))
        with pytest.raises(ValueError):
            reconstruct(spec, scheme, basis, np.zeros(3))


class TestFilterBankCoefficients:
    def test_identity_case(self):
        spec = shift_spec(5)
        scheme = SamplingScheme.for_spec(spec, [np.eye(5)[0]], 1)
        R = build_sample_matrix(spec, scheme)
        hs = structurize_left_inverse(R)
        samples = np.arange(5) + 1j
        out = filter_bank_coefficients(hs, samples, spec)
        assert np.allclose(out[0], samples)

    @pytest.mark.parametrize("seed", [15, 16])
    def test_matches_matrix_product(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig())
        hs = structurize_left_inverse(inst.sample_matrix)
        samples = rng.standard_normal(inst.sample_matrix.rows) + 1j * rng.standard_normal(
            inst.sample_matrix.rows
        )
        out = np.concatenate(filter_bank_coefficients(hs, samples, inst.spec))
        assert np.max(np.abs(out - hs.entries @ samples)) < 1e-12 * max(
            1.0, np.linalg.norm(samples)
        )

    def test_mixed_orders_wraparound(self):
        # N = (4, 2), r = 2 exercises the short-block periodic wraparound;
        # s = 4 because fewer samplers cannot reach full rank here
        rng = np.random.default_rng(17)
        op, gens = operator_with_orders(rng, 8, [4, 2])
        spec = CyclicSubspaceSpec(operator=op, generators=gens, orders=[4, 2])
        samplers = [
            rng.standard_normal(8) + 1j * rng.standard_normal(8) for _ in range(4)
        ]
        scheme = SamplingScheme.for_spec(spec, samplers, 2)
        R = build_sample_matrix(spec, scheme)
        assert check_rank(R).full_rank
        hs = structurize_left_inverse(R)
        samples = rng.standard_normal(R.rows) + 1j * rng.standard_normal(R.rows)
        out = np.concatenate(filter_bank_coefficients(hs, samples, spec))
        assert np.max(np.abs(out - hs.entries @ samples)) < 1e-12 * np.linalg.norm(samples)

    def test_structurally_deficient_config_detected(self):
        # N = (4, 2), r = 2 with square s = 3: the short block repeats rows,
        # so rank <= 5 < 6 for every sampler choice
        rng = np.random.default_rng(18)
        op, gens = operator_with_orders(rng, 8, [4, 2])
        spec = CyclicSubspaceSpec(operator=op, generators=gens, orders=[4, 2])
        samplers = [
            rng.standard_normal(8) + 1j * rng.standard_normal(8) for _ in range(3)
        ]
        scheme = SamplingScheme.for_spec(spec, samplers, 2)
        R = build_sample_matrix(spec, scheme)
        assert check_rank(R).rank <= 5
        with pytest.raises(RankDeficiencyError):
            structurize_left_inverse(R)


class TestRCirculant:
    @pytest.mark.parametrize("seed", [19, 24, 25])
    def test_built_matrix_is_circulant(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig())
        R = inst.sample_matrix
        assert is_r_circulant(R.matrix, R.ell, R.r, col_periods=list(R.orders))

    def test_identity(self):
        assert is_r_circulant(np.eye(6), 6, 1)

    def test_random_dense_fails(self):
        rng = np.random.default_rng(20)
        C = rng.standard_normal((6, 6))
        assert not is_r_circulant(C, 3, 2)

    def test_pseudo_inverse_transpose_inherits(self):
        rng = np.random.default_rng(21)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig())
        R = inst.sample_matrix
        pt = np.linalg.pinv(R.matrix).T
        assert is_r_circulant(pt, R.ell, R.r, col_periods=list(R.orders), tol=1e-10)


class TestProjection:
    def test_member_fixed(self):
        rng = np.random.default_rng(22)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig(max_dim=12))
        spec = inst.spec
        alpha = rng.standard_normal(spec.total_order)
        x = spec.synthesize(alpha)
        assert np.allclose(project_onto_subspace(spec, x), x, atol=1e-10)

    def test_orthogonal_complement_killed(self):
        # period-2 generator spans a proper sub-orbit of C^4
        op = shift_spec(4).operator
        a = np.array([1.0, 0.0, 1.0, 0.0]) / np.sqrt(2)
        sub = CyclicSubspaceSpec(operator=op, generators=[a], orders=[2])
        v = np.array([1.0, 0.0, -1.0, 0.0])
        proj = project_onto_subspace(sub, v)
        assert np.linalg.norm(proj) < 1e-12

    def test_projected_analyzers_reproduce_expansion(self):
        rng = np.random.default_rng(23)
        inst = random_cyclic_instance(rng, CyclicInstanceConfig(max_dim=12))
        spec, scheme, R = inst.spec, inst.scheme, inst.sample_matrix
        basis = reconstruction_vectors(spec, structurize_left_inverse(R))
        alpha = rng.standard_normal(spec.total_order) + 1j * rng.standard_normal(
            spec.total_order
        )
        x = spec.synthesize(alpha)
        # samples against projected analyzers coincide for subspace members
        op = spec.operator
        adj_inv = np.linalg.inv(op.matrix.conj().T)
        samples = np.empty(scheme.s * scheme.ell, dtype=complex)
        for j, b in enumerate(scheme.samplers):
            for n in range(scheme.ell):
                analyzer = np.linalg.matrix_power(adj_inv, scheme.r * n) @ b
                samples[j * scheme.ell + n] = inner(x, project_onto_subspace(spec, analyzer))
        xr = reconstruct(spec, scheme, basis, samples)
        assert np.linalg.norm(xr - x) <= 1e-8 * np.linalg.norm(x)
