"""
Tests for closed-form quench amplitudes and excitation probabilities.
"""
import math
import unittest

import pytest

from core.errors import NearResonanceError
from models.physics import AmplitudeSet, BasisLabel, GROUND, QuenchSpec, SystemParams
from services import quench as quench_service
from services.quench import (
    QuenchService,
    amplitude_state,
    complete_amplitudes,
    max_first_order_coefficient,
    non_factorization,
    overlap_amplitude,
    overlap_amplitudes,
    photon_sector_probabilities,
)

REFERENCE = SystemParams(3.721, 0.2)
REFERENCE_QUENCH = QuenchSpec(5.0, 3.75)


class TestReferenceAmplitudes(unittest.TestCase):
    """Amplitudes and probabilities at omega1=5, omega2=3.75, E0=3.721, lambda=0.2."""

    def setUp(self):
        self.amps = QuenchService.amplitudes(REFERENCE, REFERENCE_QUENCH)

    def test_single_excitation(self):
        self.assertAlmostEqual(self.amps.a_1_10, 3.8370e-3, delta=1e-7)
        self.assertEqual(self.amps.a_1_10, self.amps.a_1_01)

    def test_second_order(self):
        self.assertAlmostEqual(self.amps.a_0_11, 0.31632, delta=1e-5)
        self.assertAlmostEqual(self.amps.a_2_11, -1.7365e-3, delta=1e-7)
        self.assertAlmostEqual(self.amps.a_2_00, -0.44734, delta=1e-5)

    def test_probabilities(self):
        probs = QuenchService.probabilities(REFERENCE, REFERENCE_QUENCH)
        self.assertAlmostEqual(probs.w_10 / 1.472e-5, 1.0, delta=1e-3)
        self.assertEqual(probs.w_10, probs.w_01)
        self.assertAlmostEqual(probs.w_11 / 0.1, 1.0, delta=1e-2)
        self.assertFalse(probs.validity_warning)

    def test_non_factorization(self):
        self.assertGreater(non_factorization(REFERENCE, REFERENCE_QUENCH), 0.99)

    def test_photon_sectors(self):
        sectors = photon_sector_probabilities(REFERENCE, REFERENCE_QUENCH)
        self.assertEqual(set(sectors), {"p_00_two_photons", "p_11_zero_photons", "p_11_two_photons"})
        self.assertAlmostEqual(sectors["p_00_two_photons"], self.amps.a_2_00 ** 2)
        probs = QuenchService.probabilities(REFERENCE, REFERENCE_QUENCH)
        self.assertAlmostEqual(sectors["p_11_zero_photons"] + sectors["p_11_two_photons"], probs.w_11)


class TestLimits(unittest.TestCase):
    """Edge cases of the closed forms."""

    def test_no_coupling(self):
        amps = QuenchService.amplitudes(REFERENCE.with_coupling(0.0), REFERENCE_QUENCH)
        self.assertEqual(list(amps.as_dict().values()), [0.0] * 5)

    def test_null_quench_single_excitation(self):
        amps = QuenchService.amplitudes(REFERENCE, QuenchSpec(5.0, 5.0))
        self.assertEqual(amps.a_1_10, 0.0)
        self.assertEqual(amps.a_1_01, 0.0)

    def test_resonant_final_frequency(self):
        with self.assertRaises(NearResonanceError) as ctx:
            QuenchService.amplitudes(REFERENCE, QuenchSpec(5.0, REFERENCE.e0))
        self.assertEqual(ctx.exception.parameter, "omega2")

    def test_initial_frequency_at_qubit_gap(self):
        """Only omega2 - E0 is singular; omega1 = E0 is a valid quench."""
        params, quench = SystemParams(3.0, 0.05), QuenchSpec(3.0, 4.4)
        amps = QuenchService.amplitudes(params, quench)
        self.assertAlmostEqual(amps.a_1_10, 0.05 * (1 / 7.4 - 1 / 6.0), delta=1e-15)
        direct = QuenchService.probabilities(params, quench)
        shifted = QuenchService.probabilities_from_lamb_shifts(params, quench)
        self.assertAlmostEqual(shifted.w_10 / direct.w_10, 1.0, delta=1e-12)
        self.assertAlmostEqual(shifted.w_11 / direct.w_11, 1.0, delta=1e-12)
        # largest is |2;11> -> |3;10> at omega2
        self.assertAlmostEqual(max_first_order_coefficient(params, quench), 0.05 * math.sqrt(3) / 1.4,
                               delta=1e-15)

    def test_probability_above_one_is_flagged(self):
        probs = QuenchService.probabilities(REFERENCE, QuenchSpec(5.0, REFERENCE.e0 + 1e-3))
        self.assertTrue(probs.validity_warning)
        self.assertTrue(probs.reason.startswith("probability_above_one"))
        self.assertGreater(probs.w_11, 1.0)

    def test_first_order_coefficient_grows_near_resonance(self):
        far = max_first_order_coefficient(REFERENCE, QuenchSpec(5.0, 6.0))
        near = max_first_order_coefficient(REFERENCE, REFERENCE_QUENCH)
        self.assertGreater(near, far)
        self.assertGreater(near, 0.3)


class TestCompleteAmplitudes(unittest.TestCase):
    """Amplitudes including the second-order dressing of both states."""

    def test_null_quench_vanishes(self):
        amps = complete_amplitudes(SystemParams(3.0, 0.1), QuenchSpec(5.0, 5.0))
        self.assertEqual(list(amps.as_dict().values()), [0.0] * 5)

    def test_single_excitation_shared(self):
        params, quench = SystemParams(3.0, 0.1), QuenchSpec(5.0, 4.4)
        self.assertEqual(complete_amplitudes(params, quench).a_1_10,
                         QuenchService.amplitudes(params, quench).a_1_10)

    def test_quadratic_in_coupling(self):
        quench = QuenchSpec(5.0, 4.4)
        small = complete_amplitudes(SystemParams(3.0, 0.01), quench)
        big = complete_amplitudes(SystemParams(3.0, 0.02), quench)
        for name in ("a_0_11", "a_2_11", "a_2_00"):
            self.assertAlmostEqual(getattr(big, name) / getattr(small, name), 4.0, places=10)


def test_lamb_shift_identities(random_points):
    assert len(random_points) >= 100
    for params, quench in random_points:
        direct = QuenchService.probabilities(params, quench)
        shifted = QuenchService.probabilities_from_lamb_shifts(params, quench)
        assert shifted.w_10 == pytest.approx(direct.w_10, rel=1e-10)
        assert shifted.w_01 == pytest.approx(direct.w_01, rel=1e-10)
        assert shifted.w_11 == pytest.approx(direct.w_11, rel=1e-10)


def test_overlaps_reproduce_closed_forms(random_points):
    for params, quench in random_points:
        closed = QuenchService.amplitudes(params, quench).as_dict()
        overlaps = overlap_amplitudes(params, quench).as_dict()
        for name, value in closed.items():
            assert overlaps[name] == pytest.approx(value, rel=1e-10, abs=1e-15)


@pytest.mark.parametrize("target", [BasisLabel(0, 1, 0), BasisLabel(0, 0, 1),
                                    BasisLabel(1, 0, 0), BasisLabel(1, 1, 1), BasisLabel(2, 1, 0)])
def test_parity_forbidden_overlaps_vanish(target):
    assert overlap_amplitude(REFERENCE, REFERENCE_QUENCH, target) == 0.0


def test_exchange_symmetry(random_points):
    for params, quench in random_points[:20]:
        amps = QuenchService.amplitudes(params, quench)
        assert amps.a_1_10 == amps.a_1_01


def test_scaling_invariance():
    # amplitudes depend on ratios only
    amps = QuenchService.amplitudes(REFERENCE, REFERENCE_QUENCH).as_dict()
    factor = 2 * math.pi
    scaled = QuenchService.amplitudes(REFERENCE.scaled(factor), REFERENCE_QUENCH.scaled(factor)).as_dict()
    for name, value in amps.items():
        assert scaled[name] == pytest.approx(value, rel=1e-12)


def test_amplitude_state_layout():
    amps = QuenchService.amplitudes(REFERENCE, REFERENCE_QUENCH)
    state = amplitude_state(amps)
    assert state.cutoff == 2
    assert state[GROUND] == 1.0
    assert state[BasisLabel(2, 1, 1)] == pytest.approx(amps.a_2_11)
    assert amplitude_state(amps, ground_amplitude=None)[GROUND] == 0.0
    assert quench_service.dle_probabilities(REFERENCE, REFERENCE_QUENCH).w_11 == pytest.approx(
        abs(state[BasisLabel(0, 1, 1)]) ** 2 + abs(state[BasisLabel(2, 1, 1)]) ** 2)
    assert isinstance(AmplitudeSet.from_table(amps.by_label()), AmplitudeSet)
