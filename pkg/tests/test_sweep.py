"""
Tests for grids, sweep execution, persistence and frontier read-outs
"""
import io
import math

import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from pydantic import ValidationError

from rebsim.exceptions import NoFeasiblePointError, ParameterError
from rebsim.schemas.sweep import ProtocolOutcome, SweepAxis, SweepGrid, SweepResult
from rebsim.services.builder import ProtocolBuilder, ProtocolEvaluator
from rebsim.services.protocols import ProtocolEngine
from rebsim.services.sweep import (
    best_point,
    frontier_families,
    infidelity_at_success,
    pareto_csv,
    read_csv,
    run_sweep,
    write_csv,
)


def _outcome(success, infidelity, **swept):
    return ProtocolOutcome(
        success_probability=success,
        fidelity=1 - infidelity,
        infidelity=infidelity,
        herald_pattern="TF|FT",
        swept_values=swept,
    )


def _csv(result):
    buffer = io.StringIO()
    write_csv(result.rows, result.axis_names, buffer)
    return buffer.getvalue()


class TestGrid:
    def test_row_major_order(self):
        grid = SweepGrid(
            axes=[
                SweepAxis(name="delta_ac", min=0, max=10, count=2),
                SweepAxis(name="delta_la", min=-2, max=0, count=3),
            ]
        )
        points = list(grid.points())
        assert grid.cardinality == 6
        assert points[0] == {"delta_ac": 0.0, "delta_la": -2.0}
        assert points[1] == {"delta_ac": 0.0, "delta_la": -1.0}
        assert points[3] == {"delta_ac": 10.0, "delta_la": -2.0}

    def test_log_axis(self):
        axis = SweepAxis(name="alpha", min=1e-7, max=1e-1, count=7, scale="log")
        assert axis.values()[3] == pytest.approx(1e-4)

    def test_single_point_axis(self):
        assert list(SweepAxis(name="g", min=3, max=5, count=1).values()) == [3.0]

    def test_empty_grid_has_one_point(self):
        assert list(SweepGrid().points()) == [{}]

    @pytest.mark.parametrize(
        "axis",
        [
            {"name": "g", "min": 2, "max": 1, "count": 3},
            {"name": "g", "min": 0, "max": 1, "count": 3, "scale": "log"},
            {"name": "g", "min": 0, "max": 1, "count": 0},
        ],
    )
    def test_invalid_axes(self, axis):
        with pytest.raises(ValidationError):
            SweepAxis(**axis)

    def test_duplicate_axis_names(self):
        axis = {"name": "g", "min": 0, "max": 1, "count": 2}
        with pytest.raises(ValidationError):
            SweepGrid(axes=[axis, axis])


class TestRunSweep:
    def _config(self, make_config, axes):
        return make_config(sweep={"axes": axes})

    def test_single_point_equals_direct_run(self, make_config):
        config = self._config(make_config, [{"name": "delta_la", "min": -4, "max": -4, "count": 1}])
        result = run_sweep(ProtocolEvaluator(config), config.sweep, parallelism=1)
        spec = ProtocolBuilder(config).build({"delta_la": -4.0})
        direct = ProtocolEngine().run(spec, {"delta_la": -4.0})
        assert result.rows == [direct]
        assert result.metadata.rows == 1

    def test_failures_are_recorded_in_row(self, make_config):
        config = make_config(
            protocol={"kind": "A"},
            sweep={"axes": [{"name": "alpha", "min": 0.0, "max": 0.2, "count": 2}]},
        )
        result = run_sweep(ProtocolEvaluator(config), config.sweep, parallelism=1)
        failed, ok = result.rows
        assert failed.error.startswith("HeraldError")
        assert math.isnan(failed.success_probability)
        assert ok.ok
        assert result.metadata.failed_rows == 1

    def test_parallel_output_is_identical(self, make_config):
        config = self._config(
            make_config,
            [
                {"name": "delta_ac", "min": 0, "max": 60, "count": 2},
                {"name": "delta_la", "min": -12, "max": 0, "count": 3},
            ],
        )
        serial = run_sweep(ProtocolEvaluator(config), config.sweep, parallelism=1)
        parallel = run_sweep(ProtocolEvaluator(config), config.sweep, parallelism=2)
        assert _csv(serial) == _csv(parallel)
        assert parallel.metadata.workers == 2

    def test_invalid_parallelism(self, make_config):
        config = self._config(make_config, [])
        with pytest.raises(ParameterError):
            run_sweep(ProtocolEvaluator(config), config.sweep, parallelism=0)


class TestCsv:
    def test_columns_and_precision(self):
        rows = [_outcome(0.1234567890123456789, 1 / 3, delta_la=-1 / 7)]
        text = _csv(SweepResult(rows=rows))
        header, _ = text.splitlines()
        assert header == "delta_la,success_probability,infidelity,fidelity,herald_pattern,error"
        assert "\r" not in text
        back = read_csv(io.StringIO(text)).rows[0]
        assert back.success_probability == rows[0].success_probability
        assert back.infidelity == rows[0].infidelity
        assert back.swept_values == rows[0].swept_values

    def test_error_rows_survive(self):
        rows = [ProtocolOutcome.failed({"alpha": 0.0}, "HeraldError: no click"), _outcome(0.2, 0.1, alpha=0.1)]
        back = read_csv(io.StringIO(_csv(SweepResult(rows=rows)))).rows
        assert back[0].error == "HeraldError: no click"
        assert math.isnan(back[0].fidelity)
        assert back[1].ok

    def test_not_a_result_file(self):
        with pytest.raises(ParameterError):
            read_csv(io.StringIO("a,b\n1,2\n"))

    def test_non_numeric_cell(self):
        text = "alpha,success_probability,infidelity,fidelity,herald_pattern,error\nhigh,0.1,0.2,0.8,TF,\n"
        with pytest.raises(ParameterError):
            read_csv(io.StringIO(text))

    def test_saved_frontier_matches_in_process(self, rng):
        rows = [
            _outcome(float(s), float(f), x=float(x))
            for s, f, x in zip(rng.uniform(0, 1, 200), rng.uniform(0, 1, 200), rng.normal(size=200))
        ]
        result = SweepResult(rows=rows)
        assert pareto_csv(read_csv(io.StringIO(_csv(result)))) == pareto_csv(result)


@hyp_settings(max_examples=200, deadline=None)
@given(
    success=st.floats(0.0, 1.0),
    infidelity=st.floats(0.0, 1.0),
    swept=st.floats(allow_nan=False, allow_infinity=False),
)
def test_csv_keeps_every_double(success, infidelity, swept):
    row = _outcome(success, infidelity, g=swept)
    back = read_csv(io.StringIO(_csv(SweepResult(rows=[row])))).rows[0]
    assert back.success_probability == row.success_probability
    assert back.infidelity == row.infidelity
    assert back.fidelity == row.fidelity
    assert back.swept_values == row.swept_values


class TestFrontierReadout:
    @pytest.fixture
    def result(self):
        rows = [
            _outcome(0.1, 0.01, g=1.0),
            _outcome(0.2, 0.05, g=1.0),
            _outcome(0.3, 0.20, g=1.0),
            _outcome(0.15, 0.002, g=2.0),
            _outcome(0.25, 0.30, g=2.0),
        ]
        return SweepResult(rows=rows)

    def test_best_point(self, result):
        assert best_point(result, 0.06).success_probability == 0.2

    def test_best_point_infeasible(self, result):
        with pytest.raises(NoFeasiblePointError):
            best_point(result, 0.001)

    def test_frontier(self, result):
        frontier = pareto_csv(result)
        assert [r.success_probability for r in frontier] == [0.15, 0.2, 0.3]

    def test_families(self, result):
        families = frontier_families(result, "g")
        assert list(families) == [1.0, 2.0]
        assert len(families[1.0]) == 3
        assert len(families[2.0]) == 2

    def test_families_need_a_swept_axis(self, result):
        with pytest.raises(ParameterError):
            frontier_families(result, "kappa")

    def test_infidelity_at_success(self, result):
        frontier = pareto_csv(result)
        assert infidelity_at_success(frontier, 0.2) == pytest.approx(0.05)
        assert infidelity_at_success(frontier, 0.25) == pytest.approx(0.125)
        assert infidelity_at_success(frontier, 0.01) == pytest.approx(0.002)
        with pytest.raises(NoFeasiblePointError):
            infidelity_at_success(frontier, 0.5)
