"""
Tests for the submersion service: fiber bounds, transfer verdicts and the
energy of pulled-back cutoffs.
"""

import math

import pytest

from pcapacity.errors import CapacityError, PreconditionError
from pcapacity.models import SubmersionSpec, base_manifold
from pcapacity.services import CutoffFamily

PLANE_SCHEDULE = [2, 4, 16, 256]


@pytest.fixture
def gaussian_fibers() -> SubmersionSpec:
    """ℝ ×_f 𝕊² seen as a submersion onto ℝ: Vol(F_t) = 4π e^{-2t²}"""
    return SubmersionSpec.from_text(base_dim=1, sigma="1", fiber_volume_fn="4 * pi * exp(-2 * t^2)")


@pytest.fixture
def growing_fibers() -> SubmersionSpec:
    return SubmersionSpec.from_text(base_dim=2, sigma="t", fiber_volume_fn="t")


class TestUniformBound:
    def test_unit_fibers(self, submersions, plane_unit_fibers):
        bound = submersions.check_uniform_bound(plane_unit_fibers)
        assert bound["bounded"] is True
        assert bound["sup_estimate"] == 1.0
        assert bound["tail_exponent"] == 0.0

    def test_shrinking_fibers_peak_at_core(self, submersions, gaussian_fibers):
        bound = submersions.check_uniform_bound(gaussian_fibers)
        assert bound["bounded"] is True
        assert bound["argmax_t"] == 1.0
        assert bound["sup_estimate"] == pytest.approx(4.0 * math.pi * math.exp(-2.0), rel=1e-12)

    def test_growing_fibers(self, submersions, growing_fibers):
        bound = submersions.check_uniform_bound(growing_fibers)
        assert bound["bounded"] is False
        assert bound["tail_exponent"] == pytest.approx(1.0, rel=1e-9)

    def test_interior_maximum_is_located(self, submersions):
        spec = SubmersionSpec.from_text(base_dim=2, sigma="t", fiber_volume_fn="1 + t * exp(-t / 10)")
        bound = submersions.check_uniform_bound(spec)
        assert bound["bounded"] is True
        assert bound["argmax_t"] == pytest.approx(10.0, rel=1e-2)
        assert bound["sup_estimate"] == pytest.approx(1.0 + 10.0 / math.e, rel=1e-6)

    def test_claimed_bound_exceeded(self, submersions):
        spec = SubmersionSpec.from_text(base_dim=2, sigma="t", fiber_volume_fn="2", claimed_bound=1.5)
        bound = submersions.check_uniform_bound(spec)
        assert bound["bounded"] is False
        assert any("claimed bound" in note for note in bound["notes"])


class TestTransferVerdict:
    def test_parabolic_base_with_bounded_fibers(self, submersions, plane_unit_fibers):
        base_verdict = submersions.criterion.classify(base_manifold(plane_unit_fibers), 2.0)
        verdict = submersions.transfer_verdict(plane_unit_fibers, base_verdict, 2.0)
        assert verdict["decision"] == "Parabolic"
        assert "bounded-fiber transfer from parabolic base" in verdict["evidence_notes"]

    def test_hyperbolic_base_is_inconclusive(self, submersions):
        spec = SubmersionSpec.from_text(base_dim=3, sigma="t", fiber_volume_fn="1")
        base_verdict = submersions.criterion.classify(base_manifold(spec), 2.0)
        assert base_verdict["decision"] == "Hyperbolic"
        assert submersions.transfer_verdict(spec, base_verdict, 2.0)["decision"] == "Inconclusive"

    def test_unbounded_fibers_are_inconclusive(self, submersions, growing_fibers):
        base_verdict = submersions.criterion.classify(base_manifold(growing_fibers), 2.0)
        assert base_verdict["decision"] == "Parabolic"
        assert submersions.transfer_verdict(growing_fibers, base_verdict, 2.0)["decision"] == "Inconclusive"

    def test_never_hyperbolic(self, submersions):
        spec = SubmersionSpec.from_text(base_dim=4, sigma="t", fiber_volume_fn="1")
        for p in (1.5, 2.0, 3.0):
            base_verdict = submersions.criterion.classify(base_manifold(spec), p)
            assert submersions.transfer_verdict(spec, base_verdict, p)["decision"] != "Hyperbolic"

    def test_verdict_for_other_p_rejected(self, submersions, plane_unit_fibers):
        base_verdict = submersions.criterion.classify(base_manifold(plane_unit_fibers), 2.0)
        with pytest.raises(PreconditionError):
            submersions.transfer_verdict(plane_unit_fibers, base_verdict, 3.0)


class TestPulledBackEnergy:
    @pytest.mark.parametrize("kind", ["optimal", "log"])
    @pytest.mark.parametrize("j", PLANE_SCHEDULE)
    def test_plane_energy(self, submersions, plane_unit_fibers, kind, j):
        energy = submersions.pulled_back_energy(plane_unit_fibers, CutoffFamily(kind), 2.0, j)
        assert energy == pytest.approx(2.0 * math.pi / math.log(j), rel=1e-6)

    def test_unit_fibers_reduce_to_base_energy(self, submersions, plane_unit_fibers):
        family = CutoffFamily()
        for j in (3, 5):
            assert submersions.pulled_back_energy(plane_unit_fibers, family, 2.5, j) == pytest.approx(
                submersions.base_energy(plane_unit_fibers, family, 2.5, j), rel=1e-12
            )

    def test_linear_in_fiber_volume(self, submersions, gaussian_fibers):
        family = CutoffFamily()
        for j in (2, 3):
            single = submersions.pulled_back_energy(gaussian_fibers, family, 2.0, j)
            doubled = submersions.pulled_back_energy(gaussian_fibers.scaled_fibers(2.0), family, 2.0, j)
            assert doubled == pytest.approx(2.0 * single, rel=1e-9)

    def test_bounded_by_sup_times_base_energy(self, submersions, gaussian_fibers):
        family = CutoffFamily()
        sup = submersions.check_uniform_bound(gaussian_fibers)["sup_estimate"]
        for j in (2, 4, 8):
            energy = submersions.pulled_back_energy(gaussian_fibers, family, 2.0, j)
            assert energy <= sup * submersions.base_energy(gaussian_fibers, family, 2.0, j) * (1.0 + 1e-9)

    def test_base_energy_is_annulus_capacity(self, submersions, engine):
        spec = SubmersionSpec.from_text(base_dim=3, sigma="t", fiber_volume_fn="1")
        base = base_manifold(spec)
        for j in (2, 3):
            expected = engine.flux_capacity(base, 2.0, j ** 2, inner_radius=j)["value"]
            assert submersions.base_energy(spec, CutoffFamily(), 2.0, j) == pytest.approx(expected, rel=1e-8)

    def test_optimal_cutoff_never_beats_capacity(self, submersions, plane_unit_fibers):
        optimal = submersions.base_energy(plane_unit_fibers, CutoffFamily("optimal"), 3.0, 4)
        logarithmic = submersions.base_energy(plane_unit_fibers, CutoffFamily("log"), 3.0, 4)
        assert optimal <= logarithmic

    def test_cutoff_radius_must_exceed_one(self, submersions, plane_unit_fibers):
        with pytest.raises(CapacityError):
            submersions.pulled_back_energy(plane_unit_fibers, CutoffFamily(), 2.0, 1)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            CutoffFamily("step")


class TestVerifyDecay:
    def test_plane_energies_decay(self, submersions, plane_unit_fibers):
        report = submersions.verify_decay(plane_unit_fibers, 2.0, PLANE_SCHEDULE)
        assert report["decays"] is True
        assert report["j_schedule"] == PLANE_SCHEDULE
        for j, energy in zip(PLANE_SCHEDULE, report["energies"]):
            assert energy == pytest.approx(2.0 * math.pi / math.log(j), rel=1e-6)

    def test_doubling_fibers_doubles_energies(self, submersions, plane_unit_fibers):
        spec = SubmersionSpec.from_text(base_dim=2, sigma="t", fiber_volume_fn="1")
        single = submersions.verify_decay(spec, 2.0, PLANE_SCHEDULE)
        doubled = submersions.verify_decay(spec.scaled_fibers(2.0), 2.0, PLANE_SCHEDULE)
        assert doubled["decays"] == single["decays"]
        for a, b in zip(single["energies"], doubled["energies"]):
            assert b == pytest.approx(2.0 * a, rel=1e-9)

    def test_shrinking_fibers_over_the_line(self, submersions, gaussian_fibers):
        report = submersions.verify_decay(gaussian_fibers, 2.0, [2, 4, 8, 16])
        assert report["decays"] is True
        assert report["energies"][-1] < 1e-6 * report["energies"][0]

    def test_refuses_hyperbolic_base(self, submersions):
        spec = SubmersionSpec.from_text(base_dim=3, sigma="t", fiber_volume_fn="1")
        with pytest.raises(PreconditionError, match="Hyperbolic"):
            submersions.verify_decay(spec, 2.0, PLANE_SCHEDULE)

    def test_refuses_unbounded_fibers(self, submersions, growing_fibers):
        with pytest.raises(PreconditionError, match="not uniformly bounded"):
            submersions.verify_decay(growing_fibers, 2.0, PLANE_SCHEDULE)

    @pytest.mark.parametrize("schedule", [[4], [4, 2], [2, 2, 4]])
    def test_invalid_schedules(self, submersions, plane_unit_fibers, schedule):
        with pytest.raises(CapacityError):
            submersions.verify_decay(plane_unit_fibers, 2.0, schedule)

    def test_reuses_supplied_evidence(self, submersions, plane_unit_fibers, mocker):
        base_verdict = submersions.criterion.classify(base_manifold(plane_unit_fibers), 2.0)
        bound = submersions.check_uniform_bound(plane_unit_fibers)
        classify = mocker.spy(submersions.criterion, "classify")
        submersions.verify_decay(plane_unit_fibers, 2.0, [2, 4], base_verdict=base_verdict, bound=bound)
        assert classify.call_count == 0


class TestUniformConvergence:
    def test_cutoffs_reach_one_on_compacts(self, submersions, plane_unit_fibers):
        report = submersions.verify_uniform_convergence(plane_unit_fibers, 2.0, [2, 4, 8, 16], compact_radius=8.0)
        assert report["converges"] is True
        assert report["deviations"][0] == 1.0
        assert report["deviations"][1] == pytest.approx(0.5, rel=1e-8)
        assert report["deviations"][2:] == [0.0, 0.0]

    def test_log_family_matches_optimal_in_the_plane(self, submersions, plane_unit_fibers):
        optimal = submersions.verify_uniform_convergence(plane_unit_fibers, 2.0, [3, 5], 6.0)
        logarithmic = submersions.verify_uniform_convergence(plane_unit_fibers, 2.0, [3, 5], 6.0, CutoffFamily("log"))
        assert optimal["deviations"] == pytest.approx(logarithmic["deviations"], rel=1e-8)

    def test_schedule_short_of_the_compact(self, submersions, plane_unit_fibers):
        report = submersions.verify_uniform_convergence(plane_unit_fibers, 2.0, [2, 3], compact_radius=50.0)
        assert report["converges"] is False
