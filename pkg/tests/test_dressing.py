import itertools

import numpy as np
import pytest

from vsolitons import (
    NormingVector,
    PoleError,
    SolitonData,
    SpectralPoint,
    blaschke_factor,
    build_full_chain,
    build_reduced_chain,
    eval_chain,
    full_chain_matrix,
    one_soliton_field,
    permutation_residual,
    polarization_of,
    reconstruct_field,
)
E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def random_data(rng, N, n, positive=False):
    while True:
        us = np.sort(rng.uniform(0.1 if positive else -2.0, 2.0, N))
        if N == 1 or np.min(np.diff(us)) > 0.1:
            break
    pts = tuple(
        (
            SpectralPoint(u, rng.uniform(0.2, 2.0)),
            NormingVector(rng.standard_normal(n) + 1j * rng.standard_normal(n)),
        )
        for u in us
    )
    return SolitonData(n, pts)


class TestBlaschke:
    def test_at_origin(self):
        assert blaschke_factor(SpectralPoint(0.0, 1.0), 0.0) == pytest.approx(-1.0)

    def test_zero_at_eigenvalue(self):
        pt = SpectralPoint(0.7, 0.9)
        assert blaschke_factor(pt, pt.k) == 0.0

    def test_direct_value(self):
        assert blaschke_factor(SpectralPoint(1.0, 1.0), 1.0) == pytest.approx(-1j)

    def test_unit_modulus_on_real_axis(self):
        pt = SpectralPoint(-0.4, 1.3)
        for k in (-2.0, 0.3, 5.0):
            assert abs(blaschke_factor(pt, k)) == pytest.approx(1.0)

    def test_pole_error(self):
        pt = SpectralPoint(0.0, 1.0)
        with pytest.raises(PoleError):
            blaschke_factor(pt, pt.k.conjugate())


class TestReducedChain:
    def test_single_factor_direction_is_polarization(self):
        data = SolitonData(2, ((SpectralPoint(0.5, 1.0), NormingVector([3.0, 4.0j])),))
        chain = build_reduced_chain(data)
        expected = polarization_of(data.points[0][1]).p
        ratio = chain.factors[0].direction[0] / expected[0]
        assert np.allclose(chain.factors[0].direction, ratio * expected)
        assert abs(abs(ratio) - 1.0) < 1e-14

    def test_two_factor_recursion_frozen_oracle(self):
        # k1=(1+i)/2, k2=(-1+i)/2, beta1=e1, beta2=(e1+e2)/sqrt2:
        # xi2 = (I + (conj(f1(k2)) - 1) e1 e1^dag) beta2, evaluated directly
        data = SolitonData.from_arrays(
            [1.0, -1.0], [1.0, 1.0], [E1, (E1 + E2) / np.sqrt(2.0)]
        )
        chain = build_reduced_chain(data, (0, 1))
        expected = np.array([0.35355339059327373 - 0.35355339059327373j, 0.7071067811865476])
        got = chain.factors[1].direction * np.linalg.norm(expected)
        phase = expected[1] / got[1]
        assert abs(abs(phase) - 1.0) < 1e-12
        assert np.allclose(got * phase, expected, atol=1e-12)

    def test_orthogonal_norming_vectors_passthrough(self):
        data = SolitonData.from_arrays([0.4, 1.2], [1.0, 0.7], [E1, E2])
        chain = build_reduced_chain(data)
        assert np.allclose(np.abs(chain.factors[1].direction), E2)

    def test_empty_chain_is_identity(self):
        data = random_data(np.random.default_rng(0), 2, 2)
        chain = build_reduced_chain(data, ())
        assert np.allclose(eval_chain(chain, 0.3 + 0.1j), np.eye(2))

    def test_determinant_is_blaschke_product(self):
        rng = np.random.default_rng(1)
        data = random_data(rng, 3, 2)
        chain = build_reduced_chain(data)
        for _ in range(20):
            k = complex(rng.uniform(-3, 3), rng.uniform(0, 2))
            det = np.linalg.det(eval_chain(chain, k))
            prod = np.prod([blaschke_factor(pt, k) for pt, _ in data.points])
            assert abs(det - prod) <= 1e-12 * abs(prod)

    def test_large_real_k_tends_to_identity(self):
        data = random_data(np.random.default_rng(2), 3, 3)
        chain = build_reduced_chain(data)
        dev = np.max(np.abs(eval_chain(chain, 1e8) - np.eye(3)))
        assert dev < 1e-7

    def test_factor_inverse_is_dagger_at_conjugate(self):
        rng = np.random.default_rng(3)
        data = random_data(rng, 2, 2)
        chain = build_reduced_chain(data)
        k = complex(rng.uniform(-1, 1), rng.uniform(0.1, 1.0))
        for fac in chain.factors:
            lhs = fac.matrix_inv(k)
            assert np.allclose(lhs, fac.matrix(k.conjugate()).conj().T, atol=1e-12)
            assert np.allclose(lhs @ fac.matrix(k), np.eye(2), atol=1e-12)

    def test_degenerate_chain_impossible_for_distinct_poles(self):
        # orthogonal beta annihilated by the projector still leaves |xi| = |beta|
        data = SolitonData.from_arrays([0.3, 0.9], [1.0, 1.0], [E1, E2])
        chain = build_reduced_chain(data)
        assert len(chain.factors) == 2


class TestFullChain:
    def test_origin_direction(self):
        data = SolitonData(2, ((SpectralPoint(0.0, 1.0), NormingVector(E1)),))
        chain = build_full_chain(data, None, 0.0, 0.0)
        z = chain.factors[0].direction
        expected = np.array([1.0, 0.0, -1.0]) / np.sqrt(2.0)
        phase = z[0] / expected[0]
        assert np.allclose(z, phase * expected, atol=1e-14)

    def test_exponent_profile_matches_phase(self):
        # Im phi(x, 0, k*) = -x/2 for k = i/2, so the seed direction is
        # proportional to (e^{-x/2}, 0, -e^{x/2}); ratios verified at x=1.3
        data = SolitonData(2, ((SpectralPoint(0.0, 1.0), NormingVector(E1)),))
        chain = build_full_chain(data, None, 1.3, 0.0)
        z = chain.factors[0].direction
        assert z[0] / z[2] == pytest.approx(-np.exp(-1.3), abs=1e-12)
        assert abs(z[1]) == 0.0

    def test_projector_is_rank_one_orthogonal(self):
        rng = np.random.default_rng(4)
        data = random_data(rng, 3, 2)
        chain = build_full_chain(data, None, 0.7, -0.4)
        for fac in chain.factors:
            P = np.outer(fac.direction, fac.direction.conj())
            assert np.max(np.abs(P @ P - P)) < 1e-12
            assert np.max(np.abs(P - P.conj().T)) < 1e-12

    def test_inverse_is_dagger_at_conjugate_point(self):
        rng = np.random.default_rng(5)
        data = random_data(rng, 2, 2)
        chain = build_full_chain(data, None, 0.2, 0.1)
        k = complex(rng.uniform(-1, 1), rng.uniform(0.1, 1.5))
        M = full_chain_matrix(chain, k)
        Mdag = full_chain_matrix(chain, k.conjugate()).conj().T
        assert np.max(np.abs(M @ Mdag - np.eye(3))) < 1e-12

    def test_extreme_exponents_stay_finite(self):
        data = SolitonData(2, ((SpectralPoint(1.5, 2.0), NormingVector([1.0, 1.0])),))
        chain = build_full_chain(data, None, 800.0, 100.0)
        assert np.all(np.isfinite(chain.factors[0].direction.view(np.float64)))


class TestReconstruction:
    def test_sech_soliton_at_origin(self):
        data = SolitonData(2, ((SpectralPoint(0.0, 1.0), NormingVector(E1)),))
        val = reconstruct_field(data, 0.0, 0.0)
        assert np.allclose(val, E1, atol=1e-14)

    def test_sech_profile_and_phase(self):
        data = SolitonData(2, ((SpectralPoint(0.0, 1.0), NormingVector(E1)),))
        xs = np.linspace(-3, 3, 11)
        val = reconstruct_field(data, xs, 0.7)
        expect = np.exp(0.7j) / np.cosh(xs)
        assert np.allclose(val[:, 0], expect, atol=1e-12)
        assert np.allclose(val[:, 1], 0.0)

    def test_matches_closed_form_over_random_sample(self):
        rng = np.random.default_rng(6)
        xs = rng.uniform(-5, 5, 50)
        ts = rng.uniform(-3, 3, 50)
        for n in (1, 2, 3):
            pt = SpectralPoint(rng.uniform(-2, 2), rng.uniform(0.2, 2.0))
            nv = NormingVector(rng.standard_normal(n) + 1j * rng.standard_normal(n))
            data = SolitonData(n, ((pt, nv),))
            dev = np.max(
                np.abs(reconstruct_field(data, xs, ts) - one_soliton_field(pt, nv, xs, ts))
            )
            assert dev < 1e-12

    def test_beta_phase_scales_field(self):
        pt = SpectralPoint(0.4, 1.1)
        b = np.array([0.6, 0.3 - 0.2j])
        theta = 0.83
        a = one_soliton_field(pt, b, 1.2, -0.4)
        c = one_soliton_field(pt, np.exp(1j * theta) * b, 1.2, -0.4)
        assert np.allclose(c, np.exp(1j * theta) * a, atol=1e-14)

    def test_peak_position_log_beta(self):
        data = SolitonData(1, ((SpectralPoint(0.0, 1.0), NormingVector([2.0])),))
        xs = np.linspace(0.0, 1.5, 30001)
        env = np.abs(reconstruct_field(data, xs, 0.0))[:, 0]
        assert xs[np.argmax(env)] == pytest.approx(np.log(2.0), abs=1e-4)

    def test_two_orders_agree(self):
        rng = np.random.default_rng(7)
        data = random_data(rng, 2, 2)
        xs = rng.uniform(-3, 3, 20)
        ts = rng.uniform(-2, 2, 20)
        a = reconstruct_field(data, xs, ts, order=(0, 1))
        b = reconstruct_field(data, xs, ts, order=(1, 0))
        assert np.max(np.abs(a - b)) < 1e-10


class TestPermutationResidual:
    def test_identical_orders_zero(self):
        data = random_data(np.random.default_rng(8), 3, 2)
        ks = [0.3 + 0.2j, -1.0 + 0.5j]
        assert permutation_residual(data, (0, 1, 2), (0, 1, 2), ks) == 0.0

    def test_requires_same_index_set(self):
        data = random_data(np.random.default_rng(9), 3, 2)
        with pytest.raises(ValueError):
            permutation_residual(data, (0, 1), (1, 2), [0.5j])

    @pytest.mark.parametrize("N,n", [(2, 2), (3, 2), (3, 3), (4, 3)])
    def test_all_orders_agree(self, N, n):
        rng = np.random.default_rng(10 + N + n)
        data = random_data(rng, N, n)
        ks = [complex(rng.uniform(-2, 2), rng.uniform(0, 2)) for _ in range(8)]
        xts = [(rng.uniform(-2, 2), rng.uniform(-1, 1)) for _ in range(3)]
        ref = tuple(range(N))
        for order in itertools.permutations(range(N)):
            assert permutation_residual(data, ref, order, ks, xts) < 1e-10
