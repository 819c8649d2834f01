"""Scenario files, run artifacts, recomputation, and the CLI surface."""

import json
import math
from pathlib import Path

import pytest

from veeswarm.cli import main
from veeswarm.geometry import Circle, ConvexPolygon, Vec2
from veeswarm.metrics import TerminationReason
from veeswarm.scenario_io import (
    ScenarioError,
    load_scenario,
    parse_scenario,
    read_trajectory,
    recompute_series,
    scenario_from_dict,
    scenario_to_dict,
    serialize_metrics,
    serialize_scenario,
    write_logs,
)
from veeswarm.simulator import run

REPO = Path(__file__).resolve().parents[1]
SCENARIOS = REPO / "scenarios"

MINIMAL = """
formation.n = 4
start.x = 0.0
start.y = 0.0
goal.x = 8.0
goal.y = 0.0
"""

SMALL_RUN = """
name = small
formation.n = 3
sim.seed = 9
sim.max_steps = 120
start.x = 0.0
start.y = 0.0
goal.x = 30.0
goal.y = 0.0
obstacle.1.type = circle
obstacle.1.center_x = 5.0
obstacle.1.center_y = 2.0
obstacle.1.radius = 0.6
"""


class TestParsing:
    def test_minimal_file_gets_defaults(self):
        s = parse_scenario(MINIMAL, default_name="minimal")
        assert s.name == "minimal"
        assert s.formation.n == 4
        assert s.formation.d == 0.8
        assert s.formation.alpha == pytest.approx(3 * math.pi / 4)
        assert s.formation.leader == 2
        assert s.gains.k_f == 1.0
        assert s.sim.dt == 0.02 and s.sim.max_steps == 5000
        assert s.sim.seed == 0 and s.sim.leader_delay == 0
        assert s.sim.reconfig_mode.value == "signed"
        assert s.obstacles == ()

    def test_pi_expressions(self):
        for text, value in (
            ("3pi/4", 3 * math.pi / 4),
            ("5pi/6", 5 * math.pi / 6),
            ("0.75pi", 0.75 * math.pi),
            ("2.0", 2.0),
        ):
            s = parse_scenario(MINIMAL + f"formation.alpha = {text}\n")
            assert s.formation.alpha == pytest.approx(value)

    def test_rect_desugars_to_ccw_polygon(self):
        s = parse_scenario(
            MINIMAL
            + """
obstacle.1.type = rect
obstacle.1.min_x = 1.0
obstacle.1.min_y = 2.0
obstacle.1.max_x = 3.0
obstacle.1.max_y = 4.0
"""
        )
        (ob,) = s.obstacles
        assert isinstance(ob, ConvexPolygon)
        assert ob.vertices == (Vec2(1, 2), Vec2(3, 2), Vec2(3, 4), Vec2(1, 4))

    def test_polygon_and_circle(self):
        s = parse_scenario(
            MINIMAL
            + """
obstacle.1.type = circle
obstacle.1.center_x = -3.0
obstacle.1.center_y = 1.0
obstacle.1.radius = 0.5
obstacle.2.type = polygon
obstacle.2.vertices = 10,0 12,0 11,2
"""
        )
        assert isinstance(s.obstacles[0], Circle)
        assert isinstance(s.obstacles[1], ConvexPolygon)


class TestValidationErrors:
    def test_alpha_out_of_range_names_key(self):
        with pytest.raises(ScenarioError, match="formation"):
            parse_scenario(MINIMAL + "formation.alpha = 0.2\n")

    def test_missing_required(self):
        with pytest.raises(ScenarioError, match="formation.n"):
            parse_scenario("start.x = 0\nstart.y = 0\ngoal.x = 1\ngoal.y = 0\n")
        with pytest.raises(ScenarioError, match="goal"):
            parse_scenario("formation.n = 3\nstart.x = 0\nstart.y = 0\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ScenarioError, match="gains.k_z"):
            parse_scenario(MINIMAL + "gains.k_z = 1.0\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ScenarioError, match="duplicate"):
            parse_scenario(MINIMAL + "formation.n = 4\n")

    def test_parse_error_carries_line(self):
        with pytest.raises(ScenarioError, match="line 2"):
            parse_scenario("formation.n = 3\nbogus line\n")

    def test_start_inside_obstacle_rejected(self):
        with pytest.raises(ScenarioError, match="start"):
            parse_scenario(
                MINIMAL
                + """
obstacle.1.type = circle
obstacle.1.center_x = 0.0
obstacle.1.center_y = 0.0
obstacle.1.radius = 1.0
"""
            )

    def test_bad_gain_named(self):
        with pytest.raises(ScenarioError, match="gains"):
            parse_scenario(MINIMAL + "gains.k_f = -1.0\n")

    def test_bad_reconfig_mode(self):
        with pytest.raises(ScenarioError, match="reconfig_mode"):
            parse_scenario(MINIMAL + "reconfig_mode = sideways\n")


class TestRoundTrips:
    def test_scenario_text_round_trip(self):
        s = parse_scenario(SMALL_RUN)
        again = parse_scenario(serialize_scenario(s))
        assert again == s

    def test_scenario_dict_round_trip(self):
        s = parse_scenario(SMALL_RUN)
        assert scenario_from_dict(scenario_to_dict(s)) == s

    def test_summary_json_round_trips_scenario(self, tmp_path):
        s = parse_scenario(SMALL_RUN)
        log, series, summary = run(s)
        paths = write_logs(log, series, summary, s, tmp_path)
        payload = json.loads(paths["summary"].read_text())
        assert scenario_from_dict(payload["scenario"]) == s
        assert payload["termination"] == summary.termination.value
        assert payload["steps_used"] == summary.steps_used

    def test_shipped_scenarios_round_trip(self):
        for path in sorted(SCENARIOS.rglob("*.scn")):
            s = load_scenario(path)
            assert parse_scenario(serialize_scenario(s)) == s


class TestWriteLogs:
    def test_row_counts(self, tmp_path):
        s = parse_scenario(
            """
name = tiny
formation.n = 2
sim.seed = 1
sim.max_steps = 2
start.x = 0.0
start.y = 0.0
goal.x = 30.0
goal.y = 0.0
"""
        )
        log, series, summary = run(s)
        assert summary.termination is TerminationReason.MAX_STEPS
        paths = write_logs(log, series, summary, s, tmp_path)
        lines = paths["trajectory"].read_text().splitlines()
        # steps 0..2 logged for 2 UAVs: 1 header + 6 rows
        assert len(lines) == 1 + 6
        assert lines[0].startswith("step,time_s,uav_id,x_m,y_m")
        metrics_lines = paths["metrics"].read_text().splitlines()
        assert len(metrics_lines) == 1 + 3

    def test_rewrite_is_byte_identical(self, tmp_path):
        s = parse_scenario(SMALL_RUN)
        log, series, summary = run(s)
        a = write_logs(log, series, summary, s, tmp_path / "a")
        b = write_logs(log, series, summary, s, tmp_path / "b")
        for key in ("trajectory", "metrics", "summary"):
            assert a[key].read_bytes() == b[key].read_bytes()


class TestRecompute:
    def test_metrics_recompute_matches_exactly(self, tmp_path):
        s = parse_scenario(SMALL_RUN)
        log, series, summary = run(s)
        paths = write_logs(log, series, summary, s, tmp_path)
        loaded = read_trajectory(paths["trajectory"])
        recomputed = recompute_series(loaded, s)
        assert len(recomputed) == len(series)
        for k in range(len(series)):
            assert abs(recomputed.phi[k] - series.phi[k]) <= 1e-9
            assert abs(recomputed.avg_error[k] - series.avg_error[k]) <= 1e-9
            assert abs(recomputed.min_pairwise[k] - series.min_pairwise[k]) <= 1e-9
            assert abs(recomputed.avg_consecutive[k] - series.avg_consecutive[k]) <= 1e-9
            assert recomputed.n_reconfig_active[k] == series.n_reconfig_active[k]
        assert serialize_metrics(recomputed) == paths["metrics"].read_text()

    def test_mismatched_log_rejected(self, tmp_path):
        s = parse_scenario(SMALL_RUN)
        log, series, summary = run(s)
        paths = write_logs(log, series, summary, s, tmp_path)
        other = parse_scenario(SMALL_RUN.replace("formation.n = 3", "formation.n = 4"))
        loaded = read_trajectory(paths["trajectory"])
        with pytest.raises(ScenarioError, match="mismatch"):
            recompute_series(loaded, other)

    def test_header_checked(self, tmp_path):
        bad = tmp_path / "t.csv"
        bad.write_text("nope\n1,2,3\n")
        with pytest.raises(ScenarioError, match="header"):
            read_trajectory(bad)


class TestShippedScenarios:
    def test_narrow_passage_contents(self):
        s = load_scenario(SCENARIOS / "narrow_passage.scn")
        assert s.formation.n == 5
        assert s.formation.d == pytest.approx(0.8)
        assert s.formation.alpha == pytest.approx(3 * math.pi / 4)
        rects = [ob for ob in s.obstacles if isinstance(ob, ConvexPolygon)]
        assert len(rects) == 4  # two passage blocks plus two arena walls
        xs = sorted({v.x for v in rects[0].vertices} | {v.x for v in rects[1].vertices})
        gap = sorted(abs(v.y) for ob in rects[:2] for v in ob.vertices)[0]
        assert 2 * gap == pytest.approx(1.2)  # passage width
        assert xs[0] >= 0 and xs[-1] <= 46

    def test_table1_parameter_grid(self):
        rows = {}
        for path in sorted((SCENARIOS / "table1").glob("*.scn")):
            s = load_scenario(path)
            rows[s.name] = (s.formation.n, s.formation.d, round(s.formation.alpha, 6))
        assert len(rows) == 5
        assert rows["s1"] == (3, 1.0, round(3 * math.pi / 4, 6))
        assert rows["s2"] == (5, 1.0, round(3 * math.pi / 4, 6))
        assert rows["s3"] == (3, 0.8, round(5 * math.pi / 6, 6))
        assert rows["s4"] == (3, 1.0, round(4 * math.pi / 5, 6))
        assert rows["s5"] == (5, 0.8, round(3 * math.pi / 4, 6))


class TestCli:
    def test_run_twice_identical(self, tmp_path):
        scn = tmp_path / "small.scn"
        scn.write_text(SMALL_RUN)
        assert main(["run", "--scenario", str(scn), "--out", str(tmp_path / "r1")]) == 0
        assert main(["run", "--scenario", str(scn), "--out", str(tmp_path / "r2")]) == 0
        for name in ("trajectory.csv", "metrics.csv", "summary.json"):
            assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()

    def test_run_override_is_echoed(self, tmp_path):
        scn = tmp_path / "small.scn"
        scn.write_text(SMALL_RUN)
        out = tmp_path / "r"
        assert main([
            "run", "--scenario", str(scn), "--out", str(out),
            "--override", "gains.k_r=2.0", "--seed", "11",
        ]) == 0
        payload = json.loads((out / "summary.json").read_text())
        assert payload["scenario"]["gains"]["k_r"] == 2.0
        assert payload["scenario"]["sim"]["seed"] == 11

    def test_run_bad_scenario_exit_code(self, tmp_path, capsys):
        scn = tmp_path / "bad.scn"
        scn.write_text(MINIMAL + "formation.alpha = 0.1\n")
        assert main(["run", "--scenario", str(scn), "--out", str(tmp_path / "r")]) == 2
        assert "formation" in capsys.readouterr().err

    def test_out_dir_from_env(self, tmp_path, monkeypatch):
        scn = tmp_path / "small.scn"
        scn.write_text(SMALL_RUN)
        monkeypatch.setenv("VEE_SWARM_OUT", str(tmp_path / "envout"))
        assert main(["run", "--scenario", str(scn)]) == 0
        assert (tmp_path / "envout" / "trajectory.csv").exists()

    def test_metrics_command_matches(self, tmp_path):
        scn = tmp_path / "small.scn"
        scn.write_text(SMALL_RUN)
        out = tmp_path / "r"
        assert main(["run", "--scenario", str(scn), "--out", str(out)]) == 0
        recomputed = tmp_path / "metrics_again.csv"
        assert main([
            "metrics", "--trajectory", str(out / "trajectory.csv"),
            "--scenario", str(scn), "--out", str(recomputed),
        ]) == 0
        assert recomputed.read_bytes() == (out / "metrics.csv").read_bytes()

    def test_sweep_emits_table_and_continues_past_failures(self, tmp_path, capsys):
        good = SMALL_RUN
        bad = MINIMAL + "formation.alpha = 0.1\n"
        sdir = tmp_path / "scns"
        sdir.mkdir()
        (sdir / "a_good.scn").write_text(good)
        (sdir / "b_bad.scn").write_text(bad)
        out = tmp_path / "sweep"
        code = main(["sweep", "--scenarios", str(sdir), "--out", str(out)])
        assert code == 1  # the bad scenario is marked and reported
        lines = (out / "table.csv").read_text().splitlines()
        assert lines[0] == (
            "scenario,n,d,alpha,avg_error_m,min_distance_m,avg_consecutive_m,status"
        )
        assert len(lines) == 3
        statuses = {line.split(",")[0]: line.rsplit(",", 1)[1] for line in lines[1:]}
        assert statuses["small"] == "MaxSteps"
        assert statuses["b_bad"].startswith("Error")
