import math

import numpy as np
import pytest

from cascade_sim.analysis import (
    aggregate,
    branch_fraction,
    final_defaults,
    rescue_benefit,
    susceptibility,
    sweep,
)
from cascade_sim.engine import EnsembleResult, RealizationResult, run_ensemble
from cascade_sim.errors import InvalidParameterError
from cascade_sim.model import ModelParams
from cascade_sim.seeding import SWEEP_TAG, derive_seed


def stub_ensemble(nd_values, n=100, steps=1):
    realizations = []
    for v in nd_values:
        nd = np.zeros(steps + 1, dtype=np.int64)
        nd[-1] = v
        realizations.append(RealizationResult(
            nd_trajectory=nd,
            rescues_used=0,
            panic_onset_step=None,
            final_state_summary=np.zeros(8, dtype=np.int64),
            rescues_trajectory=np.zeros(steps + 1, dtype=np.int64),
            final_ratings=np.zeros(n, dtype=np.int64),
        ))
    return EnsembleResult(params=ModelParams(n=n, j0=0.0),
                          realizations=realizations,
                          realization_count=len(realizations))


class TestAggregate:
    def test_constant_values(self):
        stats = aggregate(stub_ensemble([10, 10, 10]))
        assert stats.nd_mean == 10.0 and stats.nd_std == 0.0
        assert stats.nd_over_n_mean == 0.1

    def test_two_point_spread(self):
        stats = aggregate(stub_ensemble([0, 20]))
        assert stats.nd_mean == 10.0
        assert stats.nd_std == pytest.approx(math.sqrt(200.0), abs=1e-12)
        assert stats.nd_over_n_std == pytest.approx(math.sqrt(200.0) / 100)

    def test_single_realization_std_zero(self):
        stats = aggregate(stub_ensemble([5]))
        assert stats.nd_std == 0.0 and stats.nd_mean == 5.0

    def test_per_step_means_elementwise(self):
        ens = stub_ensemble([4, 8], steps=2)
        ens.realizations[0].nd_trajectory[1] = 2
        ens.realizations[1].nd_trajectory[1] = 4
        assert aggregate(ens).per_step_means.tolist() == [0.0, 3.0, 6.0]

    def test_empty_rejected(self):
        with pytest.raises(InvalidParameterError):
            aggregate(stub_ensemble([]))

    def test_weak_coupling_growth_is_linear(self):
        params = ModelParams(n=1000, j0=0.0005, master_seed=11)
        stats = aggregate(run_ensemble(params, 100, workers=1))
        y = stats.per_step_means
        t = np.arange(y.size, dtype=float)
        a = np.vstack([t, np.ones_like(t)]).T
        coef, res, *_ = np.linalg.lstsq(a, y, rcond=None)
        r2 = 1.0 - res[0] / ((y - y.mean()) ** 2).sum()
        assert r2 > 0.95


class TestBranchFraction:
    def test_strictly_above_threshold_counts(self):
        ens = stub_ensemble([0, 60], n=100)
        assert branch_fraction(ens) == 0.5

    def test_at_threshold_excluded(self):
        ens = stub_ensemble([50], n=100)
        assert branch_fraction(ens, threshold=0.5) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(InvalidParameterError):
            branch_fraction(stub_ensemble([]))


class TestSweep:
    base = ModelParams(n=40, j0=0.0, sigma_j=0.002, master_seed=321)

    def test_point_reproducible_standalone(self):
        table = sweep(self.base, "j0", [0.05], 5, workers=1)
        point = table.points[0]
        seed = derive_seed(321, SWEEP_TAG, 0)
        assert point.params.master_seed == seed
        standalone = run_ensemble(point.params, 5, workers=1)
        assert aggregate(standalone).nd_mean == point.stats.nd_mean
        assert np.array_equal(aggregate(standalone).per_step_means,
                              point.stats.per_step_means)

    def test_values_sorted(self):
        table = sweep(self.base, "j0", [0.06, 0.01], 2, workers=1)
        assert [p.value for p in table.points] == [0.01, 0.06]

    def test_axis_dispatch(self):
        table = sweep(self.base, "n", [20], 2, workers=1)
        assert table.points[0].params.n == 20
        table = sweep(self.base, "b", [3], 2, workers=1)
        assert table.points[0].params.bailout_budget == 3
        table = sweep(self.base, "p0q0", [(0.4, 0.3)], 2, workers=1)
        assert table.points[0].params.p0 == 0.4
        assert table.points[0].params.q0 == 0.3

    def test_unknown_axis_rejected(self):
        with pytest.raises(InvalidParameterError):
            sweep(self.base, "temperature", [1.0], 2)

    def test_empty_values_rejected(self):
        with pytest.raises(InvalidParameterError):
            sweep(self.base, "j0", [], 2)


class TestSusceptibility:
    def test_no_dynamics_gives_zero(self):
        params = ModelParams(n=30, j0=0.0, steps=0, master_seed=4)
        est = susceptibility(params, realization_count=20, workers=1)
        assert est.chi == 0.0 and est.chi_std == 0.0

    def test_requires_zero_field(self):
        with pytest.raises(InvalidParameterError):
            susceptibility(ModelParams(n=10, j0=0.0, h=0.1))

    def test_requires_positive_delta(self):
        with pytest.raises(InvalidParameterError):
            susceptibility(ModelParams(n=10, j0=0.0), delta_h=0.0)

    def test_pairing_reduces_noise_and_sign(self):
        params = ModelParams(n=200, j0=0.025, master_seed=17)
        paired = susceptibility(params, realization_count=100, workers=1)
        unpaired = susceptibility(params, realization_count=100,
                                  paired=False, workers=1)
        assert paired.chi > 0
        assert paired.chi_std < unpaired.chi_std
        assert paired.j0 == 0.025 and paired.delta_h == 0.01
        assert paired.realization_count == 100


class TestRescueBenefit:
    base = ModelParams(n=200, j0=0.03, h=0.08, master_seed=27)

    def test_zero_budget_is_exactly_zero(self):
        points = rescue_benefit(self.base, [0], 10, workers=1)
        assert points[0].b == 0 and points[0].delta_nd_over_n == 0.0

    def test_budgets_sorted_and_deduplicated(self):
        points = rescue_benefit(self.base, [10, 0, 1, 1], 10, workers=1)
        assert [p.b for p in points] == [0, 1, 10]

    def test_budget_reduces_defaults_in_cascade_regime(self):
        points = rescue_benefit(self.base, [0, 20], 50, workers=1)
        assert points[1].delta_nd_over_n > 0

    def test_negative_budget_rejected(self):
        with pytest.raises(InvalidParameterError):
            rescue_benefit(self.base, [-1], 5)

    def test_empty_budgets_rejected(self):
        with pytest.raises(InvalidParameterError):
            rescue_benefit(self.base, [], 5)


class TestFinalDefaults:
    def test_reads_last_trajectory_entry(self):
        ens = stub_ensemble([3, 7, 1])
        assert final_defaults(ens).tolist() == [3, 7, 1]
