"""CLI contract: exit codes, unit handling and golden outputs.

Set ``SOFTGRASP_REGEN_GOLDEN=1`` to rewrite the golden files.
"""

import json
import os
from pathlib import Path

import pytest

from softgrasp import GraspConfig, analyze, rest_angle_curve
from softgrasp.cli import build_parser, main
from softgrasp.friction import StiffnessMap, build_stiffness_map, fit_friction, load_probes, load_trace

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("SOFTGRASP_REGEN_GOLDEN") == "1"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_exit(capsys, *argv):
    """Like ``run`` but for argparse-level failures that raise SystemExit."""
    with pytest.raises(SystemExit) as exc:
        main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return exc.value.code, out, err


CASES = {
    "check_worked": (2, ["check", DATA / "worked.json", "--fp-max", "30"]),
    "check_stable": (0, ["check", DATA / "worked_stable.json"]),
    "rest_curve": (0, ["rest-curve", DATA / "worked.json", "--fp-max", "30", "--steps", "30"]),
    "slip_angle": (0, ["slip-angle", DATA / "worked.json", "--fp-max", "30"]),
    "simulate_events": (0, ["simulate", DATA / "worked.json", "--dt", "1e-3", "--t-max", "5",
                            "--damping", "1e-3", "--theta0", "1e-3"]),
    "analyze_trace": (0, ["analyze-trace", DATA / "trace.csv"]),
    "fit_stiffness": (0, ["fit-stiffness", DATA / "probes.csv"]),
    "build_map": (0, ["build-map", DATA / "probes.csv"]),
    "optimize": (0, ["optimize", DATA / "peaked_map.csv", "--radius", "0.03", "--inertia", "1e-4"]),
    "optimize_infeasible": (3, ["optimize", DATA / "infeasible_map.csv", "--radius", "0.03",
                                "--inertia", "1e-4"]),
    "inertia": (0, ["inertia", "--shape", "solid-sphere", "--mass", "0.1", "--radius", "0.03"]),
    "gen_trace": (0, ["--seed", "7", "gen-trace", "--k-y", "500", "--mu", "0.5", "--noise", "0.02"]),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_output(capsys, name):
    expected_code, argv = CASES[name]
    code, out, _ = run(capsys, *argv)
    assert code == expected_code
    path = GOLDEN / f"{name}.txt"
    if REGEN:
        path.write_text(out, encoding="utf-8", newline="")
    assert out == path.read_text(encoding="utf-8"), f"{name} differs from golden file"


@pytest.mark.parametrize("name", sorted(CASES))
def test_output_stable_across_runs(capsys, name):
    _, argv = CASES[name]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_check_is_thin_adapter(capsys):
    cfg = GraspConfig.from_json((DATA / "worked.json").read_text())
    _, out, _ = run(capsys, "check", DATA / "worked.json")
    assert out == analyze(cfg).to_json() + "\n"
    assert json.loads(out)["rest_angle"] == pytest.approx(0.8411, abs=1e-4)


def test_check_stable_exit_zero(capsys):
    code, out, _ = run(capsys, "check", DATA / "worked_stable.json")
    assert code == 0 and json.loads(out)["stable"] is True


def test_check_missing_field(capsys, tmp_path):
    data = json.loads((DATA / "worked.json").read_text())
    del data["k_t"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, _, err = run(capsys, "check", path)
    assert code == 1 and "k_t" in err


def test_check_unreadable_file(capsys, tmp_path):
    code, _, err = run(capsys, "check", tmp_path / "missing.json")
    assert code == 1 and err


def test_rest_curve_is_thin_adapter(capsys):
    cfg = GraspConfig.from_json((DATA / "worked.json").read_text())
    _, out, _ = run(capsys, "rest-curve", DATA / "worked.json", "--fp-max", "30", "--steps", "30")
    assert out == rest_angle_curve(cfg, (0.0, 30.0), 30).to_csv()


def test_rest_curve_departs_at_threshold(capsys):
    _, out, _ = run(capsys, "rest-curve", DATA / "worked.json", "--fp-max", "30", "--steps", "30")
    rows = [tuple(map(float, line.split(","))) for line in out.splitlines()[1:]]
    assert all(th == 0.0 for f, th in rows if f <= 15.0)
    assert all(th > 0.0 for f, th in rows if f > 15.0)


def test_rest_curve_stable_range_all_zero(capsys):
    _, out, _ = run(capsys, "rest-curve", DATA / "worked.json", "--fp-max", "14", "--steps", "14")
    assert {line.split(",")[1] for line in out.splitlines()[1:]} == {"0.0"}


def test_rest_curve_zero_steps_is_usage_error(capsys):
    code, _, err = run_exit(capsys, "rest-curve", DATA / "worked.json", "--fp-max", "30", "--steps", "0")
    assert code == 1 and "steps" in err


@pytest.mark.parametrize("dt", ["0", "-1e-3"])
def test_simulate_bad_dt_is_usage_error(capsys, dt):
    code, _, _ = run_exit(capsys, "simulate", DATA / "worked.json", "--dt", dt)
    assert code == 1


def test_simulate_zero_start_stays_upright(capsys, tmp_path):
    out_csv = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "simulate", DATA / "worked.json", "--t-max", "1", "--out", out_csv)
    assert code == 0
    thetas = {line.split(",")[1] for line in out_csv.read_text().splitlines()[1:]}
    assert thetas == {"0.0"}
    assert [e["kind"] for e in json.loads(out)] == ["converged"]


def test_simulate_converges_to_rest_angle(capsys, tmp_path):
    events_path = tmp_path / "events.json"
    code, out, _ = run(capsys, "simulate", DATA / "worked.json", "--dt", "1e-3", "--t-max", "5",
                       "--damping", "1e-3", "--theta0", "1e-3", "--events-out", events_path)
    assert code == 0 and out == ""
    conv = [e for e in json.loads(events_path.read_text()) if e["kind"] == "converged"]
    assert conv[0]["theta"] == pytest.approx(0.8411, abs=1e-3)


def test_analyze_trace_recovers_parameters(capsys):
    code, out, err = run(capsys, "analyze-trace", DATA / "trace.csv")
    doc = json.loads(out)
    assert code == 0 and err == ""
    assert doc["k_y"] == pytest.approx(800, rel=0.02) and doc["mu"] == pytest.approx(0.6, rel=0.02)
    assert out == fit_friction(load_trace(DATA / "trace.csv")).to_json() + "\n"


def test_analyze_trace_warns_outside_envelope(capsys):
    code, out, err = run(capsys, "analyze-trace", DATA / "trace_high_mu.csv")
    assert code == 0
    assert err.startswith("warning:") and "0.49" in err
    assert json.loads(out)["in_envelope"] is False


def test_analyze_trace_quiet(capsys):
    code, _, err = run(capsys, "--quiet", "analyze-trace", DATA / "trace_high_mu.csv")
    assert code == 0 and err == ""
    code, _, err = run(capsys, "analyze-trace", "--quiet", DATA / "trace_high_mu.csv")
    assert code == 0 and err == ""


def test_analyze_trace_report_out(capsys, tmp_path):
    path = tmp_path / "fit.json"
    code, out, _ = run(capsys, "analyze-trace", DATA / "trace.csv", "--report-out", path)
    assert code == 0 and out == ""
    assert "T_m" in json.loads(path.read_text())


def test_analyze_trace_unreadable(capsys, tmp_path):
    code, _, _ = run(capsys, "analyze-trace", tmp_path / "nope.csv")
    assert code == 1


def test_analyze_trace_malformed(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t_s,disp_m,fx_N,fy_N\n0,0,1,1\n")
    code, _, err = run(capsys, "analyze-trace", path)
    assert code == 1 and "fz_N" in err


def test_fit_stiffness_single_probe(capsys):
    code, out, _ = run(capsys, "fit-stiffness", "--x0", "0", "--x1", "0.002", "--f0", "1.0", "--f1", "1.4")
    assert code == 0 and json.loads(out)[0]["k_N_m"] == pytest.approx(200.0)


def test_fit_stiffness_single_probe_mm(capsys):
    _, out, _ = run(capsys, "--units", "mm-bar-deg", "fit-stiffness", "--x0", "0", "--x1", "2",
                    "--f0", "1.0", "--f1", "1.4")
    assert json.loads(out)[0]["k_N_m"] == pytest.approx(200.0)


def test_fit_stiffness_needs_input(capsys):
    code, _, _ = run_exit(capsys, "fit-stiffness", "--x0", "0")
    assert code == 1


def test_build_map_is_thin_adapter(capsys):
    _, out, _ = run(capsys, "build-map", DATA / "probes.csv")
    assert out == build_stiffness_map(load_probes(DATA / "probes.csv")).to_csv()
    assert len(StiffnessMap.from_csv(out)) == 9


def test_optimize_known_argmax(capsys):
    code, out, _ = run(capsys, "optimize", DATA / "peaked_map.csv", "--radius", "0.03", "--inertia", "1e-4")
    best = json.loads(out)["best"]["candidate"]
    assert code == 0 and best["offset"] == 0.02 and best["pressure"] == 40000.0


def test_optimize_infeasible_reports_candidate(capsys):
    code, out, _ = run(capsys, "optimize", DATA / "infeasible_map.csv", "--radius", "0.03",
                       "--inertia", "1e-4")
    doc = json.loads(out)
    assert code == 3 and doc["feasible"] is False and doc["best"]["candidate"]["offset"] == 0.0


def test_optimize_missing_radius(capsys):
    code, _, err = run_exit(capsys, "optimize", DATA / "peaked_map.csv", "--inertia", "1e-4")
    assert code == 1 and "--radius" in err


def test_unknown_flag_rejected(capsys):
    code, _, _ = run_exit(capsys, "check", DATA / "worked.json", "--bogus")
    assert code == 1


def test_subcommand_required(capsys):
    code, _, _ = run_exit(capsys)
    assert code == 1


def test_units_modes_agree(capsys):
    _, si, _ = run(capsys, "check", DATA / "worked.json")
    _, mm, _ = run(capsys, "--units", "mm-bar-deg", "check", DATA / "worked_mm.json")
    a, b = json.loads(si), json.loads(mm)
    for key in ("f_p", "f_p_i", "rest_angle", "slip_angle", "slip_preload"):
        assert b[key] == pytest.approx(a[key], rel=1e-12)
    assert a["stable"] == b["stable"]


def test_units_degrees_for_initial_angle(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "simulate", DATA / "worked_stable.json", "--t-max", "0.01", "--theta0", "0.0174532925199432957",
        "--out", a)
    run(capsys, "--units", "mm-bar-deg", "simulate", DATA / "worked_mm.json", "--t-max", "0.01",
        "--theta0", "1", "--out", b)
    first_a = [float(v) for v in a.read_text().splitlines()[1].split(",")]
    first_b = [float(v) for v in b.read_text().splitlines()[1].split(",")]
    assert first_a[1] == pytest.approx(first_b[1], rel=1e-12)


def test_inertia_mm(capsys):
    _, si, _ = run(capsys, "inertia", "--shape", "solid-sphere", "--mass", "0.1", "--radius", "0.03")
    _, mm, _ = run(capsys, "--units", "mm-bar-deg", "inertia", "--shape", "solid-sphere", "--mass", "0.1",
                   "--radius", "30")
    assert json.loads(mm)["inertia"] == pytest.approx(json.loads(si)["inertia"], rel=1e-12)


def test_gen_trace_seeded(capsys):
    argv = ["gen-trace", "--k-y", "500", "--mu", "0.5", "--noise", "0.02"]
    a = run(capsys, "--seed", "3", *argv)[1]
    b = run(capsys, *argv, "--seed", "3")[1]
    c = run(capsys, "--seed", "4", *argv)[1]
    assert a == b and a != c


def test_help_lists_subcommands_without_generator():
    text = build_parser().format_help()
    for name in ("check", "rest-curve", "slip-angle", "simulate", "analyze-trace", "fit-stiffness",
                 "build-map", "optimize", "inertia", "--units", "--seed", "--out", "--quiet"):
        assert name in text
    assert "gen-trace" not in text
