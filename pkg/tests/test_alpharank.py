import csv
import io

import numpy as np
import pytest

from evorank import (
    EvoParams,
    ReducibleChain,
    alpha_rank,
    alpha_sweep,
    converged_alpha,
    new_metagame,
    ranking_from_distribution,
    sweep_to_csv,
)
from evorank.alpharank import SweepResult

from conftest import BIASED_RPS_MATRIX, RPS_MATRIX


class TestAlphaRank:
    def test_rps_three_way_tie(self, rps):
        result = alpha_rank(rps, EvoParams(ranking_intensity=100.0))
        assert [e.rank for e in result.entries] == [1, 1, 1]
        for entry in result.entries:
            assert f"{entry.score:.2f}" == "0.33"
        assert sum(e.score for e in result.entries) == pytest.approx(1.0, abs=1e-9)

    def test_bos_table(self, bos):
        result = alpha_rank(
            bos, EvoParams(ranking_intensity=100.0), prob_floor=1e-300
        )
        ranks = result.ranks_by_state()
        scores = result.scores_by_state()
        assert ranks[(0, 0)] == 1 and ranks[(1, 1)] == 1
        assert ranks[(0, 1)] == 2 and ranks[(1, 0)] == 2
        assert scores[(0, 0)] == pytest.approx(0.5, abs=1e-3)
        assert scores[(1, 1)] == pytest.approx(0.5, abs=1e-3)
        assert scores[(0, 1)] < 1e-3 and scores[(1, 0)] < 1e-3

    def test_reducible_without_floor(self, bos):
        with pytest.raises(ReducibleChain):
            alpha_rank(bos, EvoParams(ranking_intensity=100.0))

    def test_scores_sum_to_one(self, biased_rps):
        for alpha in (0.01, 1.0, 100.0):
            result = alpha_rank(biased_rps, EvoParams(ranking_intensity=alpha))
            assert sum(e.score for e in result.entries) == pytest.approx(1.0, abs=1e-9)

    def test_relabeling_invariance(self):
        # push rock to the last slot; rankings must follow the permutation
        base = np.asarray(BIASED_RPS_MATRIX)
        perm = [1, 2, 0]
        permuted = base[np.ix_(perm, perm)]
        game = new_metagame(2, ["R", "P", "S"], [base], symmetric_flag=True)
        relabeled = new_metagame(
            2, ["P", "S", "R"], [permuted], symmetric_flag=True
        )
        params = EvoParams(ranking_intensity=0.5)
        original = alpha_rank(game, params)
        shuffled = alpha_rank(relabeled, params)
        by_label = {e.label: (e.rank, e.score) for e in original.entries}
        for entry in shuffled.entries:
            rank, score = by_label[entry.label]
            assert entry.rank == rank
            assert entry.score == pytest.approx(score, abs=1e-9)

    def test_rank_grouping_uses_tie_tolerance(self, rps):
        result = ranking_from_distribution(
            rps, np.asarray([0.5, 0.4996, 0.0004]), alpha=1.0, tie_tol=1e-3
        )
        assert [e.rank for e in result.entries] == [1, 1, 2]

    def test_text_report_rounds_scores(self, rps):
        result = alpha_rank(rps, EvoParams(ranking_intensity=1.0))
        text = result.to_text()
        assert "0.33" in text and "0.333" not in text

    def test_csv_report_keeps_precision(self, rps):
        result = alpha_rank(rps, EvoParams(ranking_intensity=1.0))
        rows = list(csv.reader(io.StringIO(result.to_csv())))
        assert rows[0] == ["agent", "rank", "score"]
        assert float(rows[1][2]) == pytest.approx(1.0 / 3.0, abs=1e-9)


class TestSweep:
    def test_rps_uniform_everywhere_and_converges_first_point(self, rps):
        sweep = alpha_sweep(rps, m=50)
        assert len(sweep.alphas) == 30
        assert all(err is None for err in sweep.errors)
        for dist in sweep.distributions:
            np.testing.assert_allclose(dist, 1.0 / 3.0, atol=1e-6)
        assert sweep.converged_at == sweep.alphas[0]

    def test_biased_rps_three_regimes(self, biased_rps):
        sweep = alpha_sweep(biased_rps, m=50)
        # weak selection: close to uniform
        assert np.max(np.abs(sweep.distributions[0] - 1.0 / 3.0)) < 0.01
        # intermediate selection: paper has the largest mass somewhere
        argmaxes = [int(np.argmax(d)) for d in sweep.distributions]
        assert 1 in argmaxes
        # strong selection: the cycle restores uniformity
        for alpha, dist in zip(sweep.alphas, sweep.distributions):
            if alpha >= 100.0:
                np.testing.assert_allclose(dist, 1.0 / 3.0, atol=1e-3)
        assert sweep.converged_at is not None

    def test_bos_stabilization_point(self, bos):
        # (M,O) empties out before (O,M); ordering settles one grid step later
        sweep = alpha_sweep(bos, m=50, prob_floor=1e-300)
        mo_below = next(
            a for a, d in zip(sweep.alphas, sweep.distributions) if d[2] < 1e-3
        )
        om_below = next(
            a for a, d in zip(sweep.alphas, sweep.distributions) if d[1] < 1e-3
        )
        assert mo_below == pytest.approx(1e-4 * 2**9)
        assert om_below == pytest.approx(1e-4 * 2**10)
        assert mo_below < om_below
        assert sweep.converged_at == pytest.approx(1e-4 * 2**10)

    def test_errors_recorded_not_fatal(self, bos):
        sweep = alpha_sweep(bos, m=50)
        assert any(err is not None for err in sweep.errors)
        assert any(err is None for err in sweep.errors)
        for dist, err in zip(sweep.distributions, sweep.errors):
            assert (dist is None) == (err is not None)
        # rankings stabilize on the valid prefix regardless
        assert sweep.converged_at == pytest.approx(1e-4 * 2**10)

    def test_grid_validation(self, rps):
        with pytest.raises(ValueError):
            alpha_sweep(rps, alpha_start=0.0)
        with pytest.raises(ValueError):
            alpha_sweep(rps, factor=1.0)
        with pytest.raises(ValueError):
            alpha_sweep(rps, num_points=1)

    def test_csv_matrix_layout(self, rps):
        sweep = alpha_sweep(rps, m=50, num_points=4)
        rows = list(csv.reader(io.StringIO(sweep_to_csv(rps, sweep))))
        assert rows[0] == ["alpha", "R", "P", "S"]
        assert len(rows) == 5
        assert float(rows[1][0]) == pytest.approx(1e-4)
        assert float(rows[1][1]) == pytest.approx(1.0 / 3.0, abs=1e-6)


class TestConvergedAlpha:
    def test_single_point_with_window_three(self, rps):
        sweep = SweepResult(
            alphas=(0.5,),
            distributions=(np.full(3, 1.0 / 3.0),),
            errors=(None,),
            converged_at=None,
        )
        assert converged_alpha(sweep, window=3) is None

    def test_failed_points_break_the_window(self, rps):
        uniform = np.full(3, 1.0 / 3.0)
        sweep = SweepResult(
            alphas=(0.1, 0.2, 0.4, 0.8),
            distributions=(uniform, None, uniform, uniform),
            errors=(None, "ReducibleChain: x", None, None),
            converged_at=None,
        )
        assert converged_alpha(sweep, window=3) is None
        assert converged_alpha(sweep, window=2) == 0.4

    def test_score_drift_defers_convergence(self):
        drifting = (
            np.asarray([0.6, 0.4]),
            np.asarray([0.7, 0.3]),
            np.asarray([0.8, 0.2]),
            np.asarray([0.8, 0.2]),
            np.asarray([0.8, 0.2]),
        )
        sweep = SweepResult(
            alphas=(1.0, 2.0, 4.0, 8.0, 16.0),
            distributions=drifting,
            errors=(None,) * 5,
            converged_at=None,
        )
        # ordering is constant throughout, but scores move until index 2
        assert converged_alpha(sweep, rank_tol=1e-3, window=3) == 4.0
