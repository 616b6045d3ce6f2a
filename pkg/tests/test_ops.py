import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from squeezed_bsm.fock import Ket, from_terms
from squeezed_bsm.ops import (
    INF_MODEL_CEILING,
    LossParams,
    SqueezeParams,
    TruncationPolicy,
    apply_beamsplitter,
    apply_loss,
    apply_squeeze,
    squeeze_oracle,
    squeezed_number_state_amps,
)

INV_SQRT2 = 1.0 / math.sqrt(2.0)
R_SAMPLES = (0.1, 0.35, 0.5774, 0.6585, 0.9)


# ---------------------------------------------------------------------------
# parameter types
# ---------------------------------------------------------------------------

class TestParams:
    def test_r_range_enforced(self):
        SqueezeParams(0.0)
        SqueezeParams(0.9)
        with pytest.raises(ValueError):
            SqueezeParams(-0.1)
        with pytest.raises(ValueError):
            SqueezeParams(0.91)

    def test_db_figure(self):
        assert SqueezeParams(0.6585).db == pytest.approx(5.719, abs=1e-3)

    def test_xi(self):
        p = SqueezeParams(0.5, phi=math.pi / 2)
        assert p.xi == pytest.approx(0.5j * math.tanh(0.5))

    def test_policy_ceiling(self):
        assert TruncationPolicy(n_max=7).ceiling == 7
        assert TruncationPolicy().ceiling == INF_MODEL_CEILING
        with pytest.raises(ValueError):
            TruncationPolicy(rule="bogus")
        with pytest.raises(ValueError):
            TruncationPolicy(rule="fixed")  # needs fixed_k

    def test_loss_params_range(self):
        LossParams(0.0)
        LossParams(1.0)
        with pytest.raises(ValueError):
            LossParams(1.01)
        with pytest.raises(ValueError):
            LossParams(-0.01)


# ---------------------------------------------------------------------------
# beamsplitter
# ---------------------------------------------------------------------------

def two_mode_bs_oracle(dim: int) -> np.ndarray:
    """Fock-space beamsplitter from its quadratic generator (independent route).

    exp(i (pi/2) N - i (pi/4)(a^dag b + b^dag a)) reproduces the creation
    operator map a -> (i a + b)/sqrt2, b -> (a + i b)/sqrt2.
    """
    a = np.kron(np.diag(np.sqrt(np.arange(1, dim)), 1), np.eye(dim))
    b = np.kron(np.eye(dim), np.diag(np.sqrt(np.arange(1, dim)), 1))
    num = a.conj().T @ a + b.conj().T @ b
    hop = a.conj().T @ b + b.conj().T @ a
    return expm(1j * (math.pi / 2) * num - 1j * (math.pi / 4) * hop)


def _two_mode_vector(ket: Ket, dim: int) -> np.ndarray:
    vec = np.zeros(dim * dim, dtype=complex)
    for (n, m), amp in ket.items():
        vec[n * dim + m] = amp
    return vec


class TestBeamsplitter:
    def test_single_photon_split(self):
        out = apply_beamsplitter(from_terms(2, [((1, 0), 1.0)]), 0, 1)
        assert out.amplitude((1, 0)) == pytest.approx(1j * INV_SQRT2, abs=1e-15)
        assert out.amplitude((0, 1)) == pytest.approx(INV_SQRT2, abs=1e-15)

    def test_same_mode_rejected(self):
        with pytest.raises(ValueError):
            apply_beamsplitter(Ket.vacuum(2), 1, 1)

    def test_applied_twice_is_phased_swap(self):
        # the one-photon transfer matrix squares to an i-phased swap:
        # a_j -> i a_k, a_k -> i a_j
        ket = from_terms(2, [((2, 1), 0.5), ((0, 3), 0.5)])
        out = apply_beamsplitter(apply_beamsplitter(ket, 0, 1), 0, 1)
        assert out.amplitude((1, 2)) == pytest.approx(0.5 * 1j ** 3, abs=1e-14)
        assert out.amplitude((3, 0)) == pytest.approx(0.5 * 1j ** 3, abs=1e-14)
        assert out.norm_sq() == pytest.approx(ket.norm_sq(), abs=1e-14)

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3),
                              st.floats(-1, 1, allow_nan=False),
                              st.floats(-1, 1, allow_nan=False)),
                    min_size=1, max_size=5))
    @settings(max_examples=50, deadline=None)
    def test_matches_matrix_exponential_oracle(self, rows):
        ket = from_terms(2, [((n, m), complex(re, im)) for n, m, re, im in rows])
        dim = 8  # 3+3 photons max, plus headroom
        expected = two_mode_bs_oracle(dim) @ _two_mode_vector(ket, dim)
        got = _two_mode_vector(apply_beamsplitter(ket, 0, 1), dim)
        assert np.abs(got - expected).max() < 1e-12

    @given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6),
                              st.floats(-1, 1, allow_nan=False)),
                    min_size=1, max_size=6))
    @settings(max_examples=60, deadline=None)
    def test_norm_preserved(self, rows):
        ket = from_terms(4, [((n, m, 0, 0), amp) for n, m, amp in rows])
        out = apply_beamsplitter(ket, 0, 1)
        assert out.norm_sq() == pytest.approx(ket.norm_sq(), abs=1e-14)


# ---------------------------------------------------------------------------
# squeezer
# ---------------------------------------------------------------------------

class TestSqueeze:
    def test_zero_squeezing_is_identity(self):
        ket = from_terms(2, [((1, 0), 0.6), ((0, 2), 0.8)])
        out = apply_squeeze(ket, 0, SqueezeParams(0.0), TruncationPolicy(n_max=5))
        assert dict(out.items()) == dict(ket.items())

    def test_squeezed_vacuum_amplitude(self):
        # <0|S|0> = sech(r)^(1/2); frozen value cross-checked against the
        # matrix-exponential oracle
        amps = dict(squeezed_number_state_amps(0, 0.6585, 0.0, 20))
        expected = (1.0 / math.cosh(0.6585)) ** 0.5
        assert amps[0].real == pytest.approx(expected, abs=1e-12)
        assert amps[0].real == pytest.approx(0.9035965123203114, abs=1e-12)
        oracle = squeeze_oracle(80, SqueezeParams(0.6585))
        assert abs(oracle[0, 0] - amps[0]) < 1e-10

    @pytest.mark.parametrize("r", R_SAMPLES)
    def test_closed_form_matches_oracle(self, r):
        oracle = squeeze_oracle(160, SqueezeParams(r))
        worst = 0.0
        for n in range(14):
            amps = dict(squeezed_number_state_amps(n, r, 0.0, 27))
            for m in range(28):
                worst = max(worst, abs(amps.get(m, 0.0) - oracle[m, n]))
        assert worst < 1e-8

    def test_phase_carried_through(self):
        phi = 0.7
        oracle = squeeze_oracle(120, SqueezeParams(0.5, phi))
        amps = dict(squeezed_number_state_amps(2, 0.5, phi, 20))
        for m, amp in amps.items():
            assert abs(amp - oracle[m, 2]) < 1e-10

    @given(st.lists(st.tuples(st.integers(0, 3), st.floats(-1, 1, allow_nan=False)),
                    min_size=1, max_size=4),
           st.sampled_from([0.2, 0.45, 0.7]))
    @settings(max_examples=40, deadline=None)
    def test_parity_conserved(self, rows, r):
        ket = from_terms(1, [((n,), amp) for n, amp in rows])
        parities = {n % 2 for (n,), amp in ket.items()}
        if len(parities) != 1:
            return
        out = apply_squeeze(ket, 0, SqueezeParams(r), TruncationPolicy(n_max=13))
        assert {n % 2 for (n,), _ in out.items()} <= parities

    def test_detector_matched_rule_respects_ceiling(self):
        out = apply_squeeze(Ket.vacuum(1), 0, SqueezeParams(0.9),
                            TruncationPolicy(n_max=6))
        assert max(n for (n,), _ in out.items()) <= 6

    def test_fixed_rule_keeps_k_terms(self):
        out = apply_squeeze(Ket.vacuum(1), 0, SqueezeParams(0.5),
                            TruncationPolicy(n_max=None, rule="fixed", fixed_k=3))
        assert max(n for (n,), _ in out.items()) == 6

    def test_norm_not_exceeding_one(self):
        out = apply_squeeze(Ket.vacuum(1), 0, SqueezeParams(0.9),
                            TruncationPolicy(n_max=13))
        assert out.norm_sq() <= 1.0 + 1e-12


class TestSqueezeOracle:
    def test_r_zero_identity(self):
        oracle = squeeze_oracle(12, SqueezeParams(0.0))
        assert np.abs(oracle - np.eye(12)).max() < 1e-14

    def test_vacuum_column_against_closed_form(self):
        # closed-form squeezed vacuum: sech^(1/2) xi^k sqrt((2k)!)/k!
        for r in R_SAMPLES:
            oracle = squeeze_oracle(160, SqueezeParams(r))
            xi = 0.5 * math.tanh(r)
            sech = 1.0 / math.cosh(r)
            for k in range(12):
                expected = math.sqrt(sech) * xi ** k \
                    * math.sqrt(math.factorial(2 * k)) / math.factorial(k)
                assert abs(oracle[2 * k, 0] - expected) < 1e-8

    def test_opposite_parity_elements_vanish(self):
        oracle = squeeze_oracle(40, SqueezeParams(0.5))
        for n in range(14):
            for m in range(14):
                if (m - n) % 2 == 1:
                    assert abs(oracle[m, n]) < 1e-14

    def test_two_cutoff_self_consistency(self):
        a = squeeze_oracle(128, SqueezeParams(0.9))
        b = squeeze_oracle(192, SqueezeParams(0.9))
        assert np.abs(a[:28, :14] - b[:28, :14]).max() < 1e-10

    def test_tiny_dim_rejected(self):
        with pytest.raises(ValueError):
            squeeze_oracle(1, SqueezeParams(0.1))


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------

class TestLoss:
    def test_unit_transmission_appends_empty_mode(self):
        ket = from_terms(2, [((1, 2), 0.7)])
        out = apply_loss(ket, 0, LossParams(1.0))
        assert out.modes == 3
        assert out.amplitude((1, 2, 0)) == 0.7

    def test_single_photon_split(self):
        out = apply_loss(from_terms(1, [((1,), 1.0)]), 0, LossParams(0.98))
        assert out.amplitude((1, 0)) == pytest.approx(math.sqrt(0.98))
        assert out.amplitude((0, 1)) == pytest.approx(math.sqrt(0.02))

    @pytest.mark.parametrize("eta", [0.3, 0.9, 0.98])
    def test_two_photon_amplitudes(self, eta):
        out = apply_loss(from_terms(1, [((2,), 1.0)]), 0, LossParams(eta))
        assert out.amplitude((2, 0)) == pytest.approx(eta)
        assert out.amplitude((1, 1)) == pytest.approx(math.sqrt(2 * eta * (1 - eta)))
        assert out.amplitude((0, 2)) == pytest.approx(1 - eta)

    @given(st.integers(min_value=0, max_value=6),
           st.floats(min_value=0.05, max_value=0.99))
    @settings(max_examples=80, deadline=None)
    def test_binomial_law(self, n, eta):
        out = apply_loss(from_terms(1, [((n,), 1.0)]), 0, LossParams(eta))
        probs = out.pattern_probabilities([0])
        for k in range(n + 1):
            expected = math.comb(n, k) * eta ** k * (1 - eta) ** (n - k)
            assert probs.get((k,), 0.0) == pytest.approx(expected, abs=1e-14)

    @given(st.lists(st.tuples(st.integers(0, 5), st.floats(-1, 1, allow_nan=False)),
                    min_size=1, max_size=5),
           st.floats(min_value=0.0, max_value=1.0))
    @settings(max_examples=60, deadline=None)
    def test_isometry(self, rows, eta):
        ket = from_terms(2, [((n, 0), amp) for n, amp in rows])
        out = apply_loss(ket, 0, LossParams(eta))
        assert out.norm_sq() == pytest.approx(ket.norm_sq(), abs=1e-14)

    def test_eta_out_of_range(self):
        with pytest.raises(ValueError):
            apply_loss(Ket.vacuum(1), 0, LossParams(1.5))
