import csv
import io
import json
import math

import numpy as np
import pytest

from quantal_defense import ConfigError, PreconditionError, SecurityGame, optimal_allocation_closed_form
from quantal_defense.experiments import SweepSpec, builtin_space, run_lambda_sweep, run_sweep
from quantal_defense.experiments.output import format_value, meta_path, write_output, write_rows
from quantal_defense.experiments.spaces import OPTIMUM_INDEX

# mpmath (40 digits) sigma(r3) at lambda = 50 over A = 0.5, 0.75, 1, 1.25, 1.5
SIGMA_A_50 = [0.55875737468805, 0.54551891573126, 0.53430738289470, 0.52440064224899, 0.51542748854995]
SIGMA_B_50 = [0.33909768743124, 0.39112394338540, 0.43995698668798, 0.48467767849634, 0.52524909062844]


class TestBuiltinSpaces:
    def test_space_c(self):
        assert builtin_space("C", 3.0).allocations == (10.0, 5.35, 5.0, 4.8, 0.0)

    def test_space_a_unit_loss(self):
        space = builtin_space("A", 1.0)
        assert space.allocations == (4.0, 2.0, 5.0, 3.5, 0.0)
        assert space.labels == ("r1", "r2", "r3", "r4", "r5")

    def test_space_b_shifted_optimum(self):
        assert builtin_space("B", math.exp(2)).allocations[OPTIMUM_INDEX] == pytest.approx(4.0, abs=1e-14)

    @pytest.mark.parametrize("name", ["A", "B"])
    def test_r3_is_closed_form(self, name):
        for A in np.exp(np.linspace(-9.5, 9.5, 41)):
            r3 = builtin_space(name, A).allocations[OPTIMUM_INDEX]
            assert r3 == pytest.approx(optimal_allocation_closed_form(SecurityGame(10.0, A)).r, abs=1e-12)

    def test_lowercase_name(self):
        assert builtin_space("c") == builtin_space("C")

    @pytest.mark.parametrize("name,A", [("D", 1.0), ("A", math.exp(10.5)), ("B", math.exp(-11)), ("A", 0.0)])
    def test_rejected(self, name, A):
        with pytest.raises(PreconditionError):
            builtin_space(name, A)


@pytest.fixture(scope="module")
def lambda_result():
    return run_lambda_sweep(SweepSpec.from_dict({}, "lambda_sweep"))


@pytest.fixture(scope="module")
def poqa_result():
    return run_sweep(SweepSpec.from_dict({}, "poqa_sweep"))


class TestLambdaSweep:
    @pytest.fixture
    def result(self, lambda_result):
        return lambda_result

    def test_shape(self, result):
        assert result.columns == ["lambda", *(f"sigma_r{i}" for i in range(1, 6)), "dsigma_opt_dlambda"]
        assert len(result.rows) == 101
        assert result.rows[0]["lambda"] == 0.0
        assert result.rows[1]["lambda"] == pytest.approx(1e-3)
        assert result.rows[-1]["lambda"] == pytest.approx(1e4)

    def test_start_and_end(self, result):
        sigma = result.column("sigma_r3")
        assert sigma[0] == pytest.approx(0.2, abs=1e-12)
        assert sigma[-1] == pytest.approx(0.99999966795628, rel=1e-10)

    def test_monotone(self, result):
        assert np.all(np.diff(result.column("sigma_r3")) >= -1e-12)
        assert np.all(result.column("dsigma_opt_dlambda") >= 0)

    def test_rows_sum_to_one(self, result):
        cols = [f"sigma_r{i}" for i in range(1, 6)]
        for row in result.rows:
            assert math.fsum(row[c] for c in cols) == pytest.approx(1.0, abs=1e-12)

    def test_metadata(self, result):
        meta = result.metadata
        assert meta["tool"] == "quantal_defense"
        assert meta["spec"]["kind"] == "lambda_sweep"
        assert meta["game"]["R"] == 10.0
        json.dumps(meta)


class TestLossSweep:
    @pytest.mark.parametrize("space,expected", [("A", SIGMA_A_50), ("B", SIGMA_B_50)])
    def test_fixed_lambda(self, space, expected):
        result = run_sweep(SweepSpec.from_dict({"space": space, "lambda_fixed": 50.0}, "loss_sweep"))
        assert result.column("A").tolist() == [0.5, 0.75, 1.0, 1.25, 1.5]
        np.testing.assert_allclose(result.column("sigma_opt"), expected, rtol=1e-12)
        assert all(row["case_condition_ok"] for row in result.rows)

    def test_uniform_rows(self):
        spec = SweepSpec.from_dict({"space": "B", "lambda_values": [0.0, 1.0]}, "loss_sweep")
        rows = [r for r in run_sweep(spec).rows if r["lambda"] == 0.0]
        assert len(rows) == 5
        assert all(r["sigma_opt"] == pytest.approx(0.2, abs=1e-15) for r in rows)

    def test_case_condition_flagged(self):
        # space A loses its single-side property once A >= e^2
        spec = SweepSpec.from_dict({"space": "A", "A_values": [1.0, 8.0], "lambda_fixed": 5.0}, "loss_sweep")
        assert [r["case_condition_ok"] for r in run_sweep(spec).rows] == [True, False]

    def test_defaults(self):
        spec = SweepSpec.from_dict({}, "loss_sweep")
        assert spec.space == "A"
        assert len(spec.lambda_values) == 50
        assert len(run_sweep(spec).rows) == 250


class TestPoqaSweep:
    @pytest.fixture
    def result(self, poqa_result):
        return poqa_result

    def test_shape(self, result):
        assert result.columns == ["lambda", "A", "poqa", "ln_poqa", "bound"]
        assert len(result.rows) == 180
        assert result.rows[0]["lambda"] == pytest.approx(10.0)

    def test_within_bound(self, result):
        assert all(row["poqa"] <= row["bound"] for row in result.rows)
        assert all(row["ln_poqa"] == pytest.approx(math.log(row["poqa"])) for row in result.rows)

    def test_low_loss_worst_at_lambda10(self, result):
        at10 = {row["A"]: row["poqa"] for row in result.rows[:3]}
        assert at10[0.5] > at10[1.0] and at10[0.5] > at10[1.5]

    def test_rational_end(self, result):
        last = {row["A"]: row for row in result.rows[-3:]}
        assert last[1.0]["ln_poqa"] == pytest.approx(0.0, abs=1e-6)

    def test_space_note(self, result):
        assert any("space C" in note for note in result.metadata["notes"])


class TestSweepSpec:
    def test_explicit_space(self):
        spec = SweepSpec.from_dict({"space": [1, 5, 9], "R": 10, "A_fixed": 2.0, "lambda_values": [0, 1]}, "lambda_sweep")
        result = run_sweep(spec)
        assert spec.space == (1.0, 5.0, 9.0)
        assert result.columns[1:4] == ["sigma_r1", "sigma_r2", "sigma_r3"]

    def test_round_trip(self):
        spec = SweepSpec.from_dict({"space": "b", "lambda_fixed": 3}, "loss_sweep")
        assert SweepSpec.from_dict(spec.to_dict()) == spec

    @pytest.mark.parametrize(
        "data,path",
        [
            ({"kind": "nope"}, "kind"),
            ({"lambda_values": [1.0, 0.5]}, "lambda_values[1]"),
            ({"lambda_values": [1.0, "x"]}, "lambda_values[1]"),
            ({"lambda_values": []}, "lambda_values"),
            ({"lambda_values": {"log_range": [0, 1]}}, "lambda_values.log_range"),
            ({"lambda_values": {"log_range": [1, 10], "count": 1}}, "lambda_values.count"),
            ({"lambda_values": {"log_range": [1, 10], "step": 2}}, "lambda_values"),
            ({"lambda_values": [-1.0, 1.0]}, "lambda_values[0]"),
            ({"lambda_fixed": -2}, "lambda_fixed"),
            ({"A_fixed": 0}, "A_fixed"),
            ({"space": "Z"}, "space"),
            ({"space": [1, 12], "R": 10}, "space"),
            ({"space": "C", "R": 5}, "R"),
            ({"R": -1}, "R"),
            ({"output_path": 3}, "output_path"),
        ],
    )
    def test_field_paths(self, data, path):
        data = {"kind": "lambda_sweep", **data}
        with pytest.raises(ConfigError) as info:
            SweepSpec.from_dict(data)
        assert info.value.path == path

    def test_unknown_field(self):
        with pytest.raises(ConfigError, match="unknown fields"):
            SweepSpec.from_dict({"colour": 1}, "poqa_sweep")

    def test_loss_sweep_needs_rebuildable_space(self):
        with pytest.raises(ConfigError) as info:
            SweepSpec.from_dict({"space": "C"}, "loss_sweep")
        assert info.value.path == "space"

    def test_negative_loss(self):
        with pytest.raises(ConfigError) as info:
            SweepSpec.from_dict({"A_values": [0.5, -1.0]}, "poqa_sweep")
        assert info.value.path == "A_values[1]"

    def test_grid_with_zero(self):
        spec = SweepSpec.from_dict({"lambda_values": {"log_range": [1, 100], "count": 3, "include_zero": True}}, "lambda_sweep")
        assert spec.lambda_values == pytest.approx((0.0, 1.0, 10.0, 100.0))


class TestOutput:
    def test_format_value(self):
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value(True) == "true"
        assert format_value(3) == "3"
        assert format_value(math.nan) == "nan"

    def test_csv_round_trip(self):
        rows = [{"a": 1 / 3, "b": "x"}, {"a": math.pi, "b": "y"}]
        buf = io.StringIO()
        write_rows(rows, ["a", "b"], buf)
        parsed = list(csv.DictReader(io.StringIO(buf.getvalue())))
        assert [float(r["a"]) for r in parsed] == [1 / 3, math.pi]

    def test_jsonl(self):
        buf = io.StringIO()
        write_rows([{"a": 1.5, "b": math.nan}], ["a", "b"], buf, "jsonl")
        assert json.loads(buf.getvalue()) == {"a": 1.5, "b": None}

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            write_rows([], ["a"], io.StringIO(), "xml")

    def test_sibling_meta(self, tmp_path):
        out = tmp_path / "sub" / "run.csv"
        write_output([{"a": 1.0}], ["a"], out, metadata={"seed": 7})
        assert meta_path(out) == tmp_path / "sub" / "run.meta.json"
        assert json.loads(meta_path(out).read_text()) == {"seed": 7}
        assert out.read_text() == "a\n1\n"

    def test_deterministic_rows(self):
        spec = SweepSpec.from_dict({}, "lambda_sweep")
        outputs = []
        for _ in range(2):
            buf = io.StringIO()
            result = run_sweep(spec)
            write_rows(result.rows, result.columns, buf)
            outputs.append(buf.getvalue())
        assert outputs[0] == outputs[1]
