"""
Tests for the parabolicity criterion, p sweeps and the two-route cross check.
"""

import math

import pytest

from conftest import euclidean
from pcapacity.errors import CriterionError
from pcapacity.models import ModelManifold, sphere_area
from pcapacity.services import ClassifyOptions, ParabolicityService

P_GRID = [1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0]


class TestCriterionIntegrand:
    def test_euclidean_space(self, criterion, r3):
        assert criterion.criterion_integrand(r3, 2.0, 2.0) == pytest.approx(1.0 / (16.0 * math.pi), rel=1e-14)

    @pytest.mark.parametrize("t", [1.0, 7.0, 1e5])
    def test_critical_exponent_is_one_over_t(self, criterion, t):
        expected = sphere_area(2) ** (1.0 / (1.0 - 3.0)) / t
        assert criterion.criterion_integrand(euclidean(3), 3.0, t) == pytest.approx(expected, rel=1e-12)

    def test_gaussian_warp(self, criterion, gaussian_warp):
        assert criterion.criterion_integrand(gaussian_warp, 2.0, 1.0) == pytest.approx(math.exp(2.0) / 2.0, rel=1e-14)

    def test_log_samples(self, criterion, gaussian_warp):
        samples = criterion.log_samples(gaussian_warp, 2.0, 100.0, count=11)
        assert len(samples) == 11
        assert samples[0][0] == pytest.approx(1.0)
        assert samples[0][1] == pytest.approx(2.0 - math.log(2.0))
        assert samples[-1][0] == pytest.approx(100.0)

    def test_rejects_p_at_most_one(self, criterion, r3):
        with pytest.raises(CriterionError, match="p must exceed 1"):
            criterion.criterion_integrand(r3, 1.0, 2.0)


class TestClassify:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("p", P_GRID)
    def test_euclidean_threshold_matrix(self, criterion, n, p):
        verdict = criterion.classify(euclidean(n), p)
        expected = "Parabolic" if p >= n else "Hyperbolic"
        assert verdict["decision"] == expected, verdict["evidence_notes"]
        if expected == "Hyperbolic":
            assert verdict["cauchy_converged"]
            assert verdict["tail_exponent"] < -1.0 - 0.05

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_borderline_cases_use_log_refit(self, criterion, n):
        verdict = criterion.classify(euclidean(n), float(n))
        assert verdict["tail_exponent"] == pytest.approx(-1.0, abs=1e-9)
        assert verdict["log_refit_exponent"] == 0.0
        assert verdict["t_reached"] == 1e6

    def test_gaussian_warp_is_parabolic(self, criterion, gaussian_warp):
        verdict = criterion.classify(gaussian_warp, 2.0)
        assert verdict["decision"] == "Parabolic"
        assert verdict["t_reached"] < 1e6
        assert verdict["log_partial_integral"] > math.log(1e100)
        assert any("exceeds" in note for note in verdict["evidence_notes"])

    def test_hyperbolic_space(self, criterion, hyperbolic3):
        verdict = criterion.classify(hyperbolic3, 2.0)
        assert verdict["decision"] == "Hyperbolic"
        assert verdict["exponential_rate"] == pytest.approx(-2.0, rel=1e-6)
        assert verdict["r2_exponential"] > verdict["r2_power"]

    def test_bounded_warp_over_euclidean_base(self, criterion):
        m = ModelManifold.from_text(base_dim=3, sigma="t", warp="2 - 1 / (1 + t)", fiber_dim=2, fiber_volume=4 * math.pi)
        assert criterion.classify(m, 3.0)["decision"] == "Parabolic"

    def test_log_corrected_borderline_is_parabolic(self, criterion):
        # g = 1/(2π t log(1+t)^0.2): tail exponent just below -1, still divergent
        m = ModelManifold.from_text(base_dim=2, sigma="t * log(1 + t)^0.2")
        verdict = criterion.classify(m, 2.0)
        assert -1.05 < verdict["tail_exponent"] < -1.0
        assert verdict["log_refit_exponent"] == pytest.approx(-0.2, abs=0.01)
        assert verdict["decision"] == "Parabolic"

    def test_checkpoints_double(self, criterion, r3):
        verdict = criterion.classify(r3, 2.0)
        ts = [T for T, _ in verdict["checkpoints"]]
        assert ts[:3] == [2.0, 4.0, 8.0]
        assert ts[-1] == 1e6
        logs = [value for _, value in verdict["checkpoints"]]
        assert all(b >= a for a, b in zip(logs, logs[1:]))

    def test_partial_integral_value(self, criterion, r3):
        verdict = criterion.classify(r3, 2.0)
        assert verdict["partial_integral"] == pytest.approx((1.0 - 1e-6) / (4.0 * math.pi), rel=1e-9)

    def test_deterministic(self, criterion, r3, hyperbolic3):
        for m in (r3, hyperbolic3):
            assert criterion.classify(m, 2.5) == criterion.classify(m, 2.5)

    @pytest.mark.parametrize("c", [0.1, 3.0, 50.0])
    def test_invariant_under_constant_rescaling(self, criterion, gaussian_warp, r3, c):
        assert criterion.classify(gaussian_warp.scaled(warp_factor=c), 2.0)["decision"] == "Parabolic"
        assert criterion.classify(r3.scaled(sigma_factor=c, volume_factor=c), 2.0)["decision"] == "Hyperbolic"
        assert criterion.classify(euclidean(2).scaled(sigma_factor=c), 2.0)["decision"] == "Parabolic"

    def test_short_horizon_options(self, r3):
        service = ParabolicityService(options=ClassifyOptions(T_max=1e4))
        verdict = service.classify(r3, 2.0)
        assert verdict["t_reached"] == 1e4
        assert verdict["decision"] == "Hyperbolic"

    def test_explicit_tail_window(self, criterion, r3):
        verdict = criterion.classify(r3, 2.0, ClassifyOptions(tail_window=(10.0, 1e3)))
        assert verdict["tail_exponent"] == pytest.approx(-2.0, abs=1e-9)

    def test_invalid_options(self):
        with pytest.raises(ValueError):
            ClassifyOptions(T_max=0.5)
        with pytest.raises(ValueError):
            ClassifyOptions(margin=0.0)
        with pytest.raises(ValueError):
            ClassifyOptions(tail_window=(10.0, 5.0))

    def test_rejects_p_at_most_one(self, criterion, r3):
        with pytest.raises(CriterionError):
            criterion.classify(r3, 0.9)


class TestSweep:
    def test_euclidean_critical_exponent(self, criterion, r3):
        table = criterion.sweep_p(r3, [1.5, 2.0, 2.5, 3.0, 3.5, 4.0])
        decisions = [row["verdict"]["decision"] for row in table["rows"]]
        assert decisions == ["Hyperbolic"] * 3 + ["Parabolic"] * 3
        assert 2.5 <= table["critical_p_estimate"] <= 3.0

    def test_hyperbolic_throughout(self, criterion, hyperbolic3):
        table = criterion.sweep_p(hyperbolic3, [1.5, 2.5, 3.5, 4.5, 6.0])
        assert {row["verdict"]["decision"] for row in table["rows"]} == {"Hyperbolic"}
        assert table["critical_p_estimate"] is None
        assert table["notes"]

    def test_parabolic_throughout(self, criterion, gaussian_warp):
        table = criterion.sweep_p(gaussian_warp, [1.5, 2.0, 3.0, 4.5, 6.0])
        assert {row["verdict"]["decision"] for row in table["rows"]} == {"Parabolic"}
        assert table["critical_p_estimate"] is None

    def test_rows_follow_grid_order(self, criterion, r3):
        grid = [1.5, 3.5, 4.0]
        assert [row["p"] for row in criterion.sweep_p(r3, grid)["rows"]] == grid

    def test_monotone_on_euclidean_corpus(self, criterion):
        for n in (2, 3, 4):
            decisions = [row["verdict"]["decision"] for row in criterion.sweep_p(euclidean(n), P_GRID)["rows"]]
            first = decisions.index("Parabolic")
            assert set(decisions[first:]) == {"Parabolic"}

    @pytest.mark.parametrize("grid", [[], [0.5, 2.0], [2.0, 2.0], [3.0, 2.0]])
    def test_invalid_grids(self, criterion, r3, grid):
        with pytest.raises(CriterionError):
            criterion.sweep_p(r3, grid)


class TestCrossCheck:
    def test_euclidean_space_agrees(self, criterion, r3):
        result = criterion.cross_check(r3, 2.0)
        assert result["criterion"]["decision"] == "Hyperbolic"
        assert result["capacity_trend"] == "to-positive"
        assert result["agrees"] is True

    def test_plane_agrees(self, criterion, r2):
        result = criterion.cross_check(r2, 2.0)
        assert result["criterion"]["decision"] == "Parabolic"
        assert result["capacity_trend"] == "to-zero"
        assert result["agrees"] is True

    @pytest.mark.parametrize("fixture", ["gaussian_warp", "hyperbolic3", "constant_s"])
    def test_corpus_agrees(self, criterion, request, fixture):
        result = criterion.cross_check(request.getfixturevalue(fixture), 2.0)
        assert result["agrees"] is True

    @pytest.mark.parametrize("n, p", [(2, 3.0), (3, 3.0), (4, 3.0), (4, 4.5), (3, 1.5)])
    def test_euclidean_corpus_agrees(self, criterion, n, p):
        assert criterion.cross_check(euclidean(n), p)["agrees"] is True

    def test_inconclusive_criterion_leaves_agreement_absent(self, criterion, r3, mocker):
        verdict = criterion.classify(r3, 2.0)
        verdict["decision"] = "Inconclusive"
        mocker.patch.object(criterion, "classify", return_value=verdict)
        spy = mocker.spy(criterion.capacity, "capacity_limit")
        result = criterion.cross_check(r3, 2.0)
        assert result["agrees"] is None
        assert spy.call_count == 1

    @pytest.mark.parametrize("p, decision", [(2.9, "Hyperbolic"), (3.1, "Parabolic")])
    def test_near_critical_exponents_agree(self, criterion, r3, p, decision):
        result = criterion.cross_check(r3, p)
        assert result["criterion"]["decision"] == decision
        assert result["capacity_trend"] != "undetermined"
        assert result["agrees"] is True

    def test_undetermined_trend_is_reported_as_disagreement(self, criterion, r3, mocker):
        limit = criterion.capacity.capacity_limit(r3, 2.0)
        limit["trend"] = "undetermined"
        mocker.patch.object(criterion.capacity, "capacity_limit", return_value=limit)
        result = criterion.cross_check(r3, 2.0)
        assert result["criterion"]["decision"] == "Hyperbolic"
        assert result["capacity_trend"] == "undetermined"
        assert result["agrees"] is False
