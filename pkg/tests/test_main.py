import csv
import json
import math
from pathlib import Path

import pytest

from main import (build_parser, load_betas, load_manifest_argv, main, parse_complex_list, parse_floats, run,
                  to_jsonable)
from errors import InvalidParameter, ModelFileError
from run_store import RunStatus, get_run_store

MODELS = Path(__file__).resolve().parent.parent / "models"


def _manifests(directory):
    return sorted(Path(directory).glob("*.manifest.json"))


def test_parse_helpers(tmp_path):
    assert parse_complex_list("0.3+0.1i, 1.2") == [0.3 + 0.1j, 1.2 + 0j]
    assert parse_floats("1,2,3", 3) == [1.0, 2.0, 3.0]
    with pytest.raises(InvalidParameter):
        parse_floats("1,2", 3, "--rect")
    with pytest.raises(InvalidParameter):
        parse_floats("1,x")

    path = tmp_path / "betas.json"
    path.write_text(json.dumps([{"re": 0.5, "im": 1.0}, [2.0, 0.0], "0.1-0.2i", 3]))
    assert load_betas(str(path)) == [0.5 + 1j, 2.0, 0.1 - 0.2j, 3.0]
    with pytest.raises(ModelFileError):
        load_betas(str(tmp_path / "none.json"))


def test_to_jsonable_handles_complex_and_numpy():
    import numpy as np
    payload = to_jsonable({"z": 1 + 2j, "arr": np.array([1.5, 2.5]), "k": np.int64(3)})
    assert payload == {"z": {"re": 1.0, "im": 2.0}, "arr": [1.5, 2.5], "k": 3}


def test_phase_csv(tmp_path, registry_path):
    out = tmp_path / "phases.csv"
    code = run(["--manifest-dir", str(tmp_path), "phase", "--model", str(MODELS / "grem2.json"),
                "--grid", "-1,1,-1,1,5,4", "--out", str(out)])
    assert code == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["sigma", "tau", "level_1", "level_2", "d1", "d2", "d3", "p", "area_density"]
    assert len(rows) == 1 + 20
    assert all(float(r[7]) > 0 for r in rows[1:])

    manifest = json.loads(_manifests(tmp_path)[0].read_text())
    assert manifest["command"] == "phase"
    assert manifest["outputs"] == [str(out)]
    assert manifest["model"]["d"] == 2
    assert "leaf_budget" in manifest["config"]

    record = get_run_store().get_run(manifest["run_id"])
    assert record.status is RunStatus.SUCCEEDED


def test_phase_census(tmp_path, registry_path):
    out = tmp_path / "census.json"
    code = run(["--manifest-dir", str(tmp_path), "phase", "--model", str(MODELS / "grem2.json"),
                "--grid", "-3,3,-3,3,120,120", "--census", "--out", str(out)])
    assert code == 0
    census = json.loads(out.read_text())
    assert census["ordered"]
    assert census["phase_count"] == len(census["words"])


def test_moments_json(tmp_path, registry_path):
    out = tmp_path / "moments.json"
    code = run(["--manifest-dir", str(tmp_path), "moments", "--model", str(MODELS / "rem.json"),
                "--n", "6", "--beta", "0", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["var"] == 0.0
    assert report["mean"]["re"] == pytest.approx(2 ** 6)


def test_crem_json(tmp_path, registry_path):
    out = tmp_path / "crem.json"
    code = run(["--manifest-dir", str(tmp_path), "crem", "--A", str(MODELS / "profile.json"),
                "--alpha", repr(math.e), "--beta", "0", "--out", str(out)])
    assert code == 0
    result = json.loads(out.read_text())
    assert result["p_infty"] == pytest.approx(1.0)
    assert result["phase"] == "E"


def test_validation_errors_exit_two(tmp_path, registry_path, capsys):
    code = run(["--manifest-dir", str(tmp_path), "zeta", "--d", "2", "--z", "0.4,0.3", "--reps", "5"])
    assert code == 2
    assert "DomainError" in capsys.readouterr().err

    code = run(["--manifest-dir", str(tmp_path), "zeta", "--d", "2", "--z", "0.9"])
    assert code == 2

    failed = get_run_store().list_runs(status=RunStatus.FAILED)
    assert len(failed) == 2
    assert all(r.exit_code == 2 for r in failed)
    assert _manifests(tmp_path) == []


def test_phase_boundary_exit_two(tmp_path, registry_path):
    code = run(["--manifest-dir", str(tmp_path), "moments", "--model", str(MODELS / "rem.json"),
                "--n", "6", "--beta", "0.5+0.9i", "--normalizer", "c_n"])
    assert code == 2


def test_rerun_reproduces_outputs(tmp_path, registry_path):
    out = tmp_path / "ens.bin"
    argv = ["--threads", "1", "--seed", "4", "--manifest-dir", str(tmp_path), "simulate",
            "--model", str(MODELS / "rem.json"), "--n", "5", "--betas", "0.3+0.2i,1.5",
            "--reps", "6", "--out", str(out), "--summary", str(tmp_path / "summary.json")]
    assert run(argv) == 0
    first = out.read_bytes()
    manifest = _manifests(tmp_path)[0]

    out.unlink()
    assert run(["rerun", "--manifest", str(manifest)]) == 0
    assert out.read_bytes() == first
    assert len(get_run_store().list_runs(command="simulate")) == 2


def test_global_flags_after_subcommand(tmp_path, registry_path):
    zeros_out = tmp_path / "zeros.csv"
    code = run(["zeros", "--model", str(MODELS / "rem.json"), "--n", "6", "--seed", "3",
                "--rect", "0.1,0.5,1.0,1.5", "--manifest-dir", str(tmp_path), "--out", str(zeros_out)])
    assert code == 0
    assert zeros_out.exists()
    assert get_run_store().list_runs(command="zeros")[0].seed == 3

    args = build_parser().parse_args(["--seed", "1", "--threads", "4", "simulate", "--model", "m.json",
                                      "--n", "5", "--betas", "1.0", "--seed", "9", "--leaf-budget", "100"])
    assert (args.seed, args.threads, args.leaf_budget) == (9, 4, 100)
    args = build_parser().parse_args(["--seed", "1", "crem", "--A", "p.json", "--alpha", "2", "--beta", "1"])
    assert args.seed == 1
    assert args.threads is None


def test_seed_position_does_not_change_ensemble(tmp_path, registry_path):
    common = ["--model", str(MODELS / "rem.json"), "--n", "5", "--betas", "0.3+0.2i,1.5", "--reps", "6"]
    before = tmp_path / "before.bin"
    after = tmp_path / "after.bin"
    assert run(["--seed", "4", "--threads", "1", "--manifest-dir", str(tmp_path), "simulate"] + common +
               ["--out", str(before)]) == 0
    assert run(["simulate"] + common + ["--seed", "4", "--threads", "2", "--manifest-dir", str(tmp_path),
                                        "--out", str(after)]) == 0
    assert before.read_bytes() == after.read_bytes()


def test_manifest_threads_override(tmp_path):
    path = tmp_path / "m.manifest.json"
    path.write_text(json.dumps({"argv": ["--threads", "8", "--seed", "1", "crem"]}))
    assert load_manifest_argv(str(path), 2) == ["--threads", "2", "--seed", "1", "crem"]
    assert load_manifest_argv(str(path), None) == ["--threads", "8", "--seed", "1", "crem"]


def test_bad_manifest_exit_two(tmp_path, registry_path):
    assert main(["rerun", "--manifest", str(tmp_path / "missing.json")]) == 2


def test_runs_listing(tmp_path, registry_path, capsys):
    run(["--manifest-dir", str(tmp_path), "crem", "--A", str(MODELS / "profile.json"),
         "--alpha", "2.0", "--beta", "1.0", "--out", str(tmp_path / "c.json")])
    capsys.readouterr()
    assert run(["runs", "--command", "crem"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1
    assert "\tcrem\tsucceeded\t0\t" in lines[0]

    assert run(["runs", "--stats"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["total_runs"] == 1
