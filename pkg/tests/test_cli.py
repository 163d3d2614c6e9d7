import json
import subprocess
import sys

import pytest

from blockenc import cli
from blockenc.errors import PhaseSolverError
from blockenc.qasm import from_qasm
from blockenc.qcore import circuit_unitary
from blockenc.qsp import PhaseFactors

CIRC = ["--family", "circulant", "--n", "3", "--alpha", "0.5", "--beta", "0.25", "--gamma", "0.25"]


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def test_build_writes_bundle(tmp_path, capsys):
    code, out = run(["build", *CIRC, "--output-dir", str(tmp_path)], capsys)
    assert code == 0
    meta = json.loads(out)
    assert meta["scale"] == 4.0 and meta["m"] == 3
    for name in ("circuit.qasm", "circuit.txt", "report.json"):
        assert (tmp_path / name).exists()
    assert json.loads((tmp_path / "report.json").read_text()) == meta
    text = (tmp_path / "circuit.qasm").read_text()
    assert "// scale: 4.0" in text
    assert from_qasm(text).width == 6
    assert (tmp_path / "circuit.txt").read_text().startswith("q0:")


def test_build_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["build", *CIRC, "--output-dir", str(d)]) == 0
    capsys.readouterr()
    for name in ("circuit.qasm", "circuit.txt", "report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_build_from_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(f"# ebtree\nfamily = ebtree\nn = 3\nalpha = 0.5\nbeta = 0.3\ngamma = 0.4\noutput_dir = {tmp_path}\n")
    code, out = run(["build", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["scale"] == 8.0


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "circulant", "n": 3, "alpha": 0.5, "beta": 0.25, "gamma": 0.25}))
    code, out = run(["verify", "--config", str(cfg), "--n", "2"], capsys)
    assert code == 0 and json.loads(out)["n"] == 2


def test_verify_passes(capsys):
    code, out = run(["verify", *CIRC], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert rep["spectral_error"] <= 1e-12
    assert rep["unitarity_residual"] <= 1e-12
    for key in ("family", "n", "m", "scale", "hermitian", "gate_count", "wall_time_ms", "tolerance"):
        assert key in rep


def test_verify_perturbed_fails(capsys):
    code, out = run(["verify", *CIRC, "--perturb", "0.1"], capsys)
    assert code == 1
    assert json.loads(out)["spectral_error"] > 1e-3


def test_verify_writes_report_with_output_dir(tmp_path, capsys):
    code, _ = run(["verify", *CIRC, "--output-dir", str(tmp_path)], capsys)
    assert code == 0
    assert json.loads((tmp_path / "verify.json").read_text())["passed"]


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--family", "tridiagonal", "--n", "3", "--alpha", "0.5", "--beta", "0.2", "--gamma", "0.3"],
        ["verify", "--family", "ebtree", "--n", "3", "--alpha", "0.5", "--beta", "0.3", "--gamma", "0.4"],
        ["verify", "--family", "sym2x2", "--alpha", "0.6", "--beta", "-0.3"],
        ["verify", *CIRC, "--oc-ordering", "cjlcyc", "--oa-style", "uniformly_controlled"],
    ],
)
def test_verify_families(argv, capsys):
    code, out = run(argv, capsys)
    assert code == 0, out


def test_hermitian_scheme(capsys):
    code, out = run(["verify", "--family", "circulant", "--scheme", "hermitian",
                     "--n", "3", "--alpha", "0.5", "--beta", "0.25"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["hermitian"] is True


def test_hermitian_scheme_other_family_rejected(capsys):
    code, _ = run(["verify", "--family", "ebtree", "--scheme", "hermitian",
                   "--n", "3", "--alpha", "0.5", "--beta", "0.25"], capsys)
    assert code == 2


def test_walk_command(capsys):
    for k in (1, 2, 3):
        code, out = run(["walk", "--n", "3", "--alpha", "0.5", "--beta", "0.25", "--k", str(k)], capsys)
        assert code == 0 and json.loads(out)["spectral_error"] <= 1e-10


def test_walk_asymmetric_weights_is_config_error(capsys):
    code, _ = run(["walk", "--n", "3", "--alpha", "0.5", "--beta", "0.3", "--gamma", "0.2"], capsys)
    assert code == 2


def test_missing_family_exit_2(capsys):
    assert cli.main(["verify", "--n", "3"]) == 2


def test_unknown_config_key_exit_2(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"family": "circulant", "colour": 1}')
    assert cli.main(["verify", "--config", str(cfg)]) == 2


def test_bad_flag_exit_2():
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "--nonsense"])
    assert info.value.code == 2


def test_infeasible_exit_3(capsys):
    bad = ["--family", "circulant", "--n", "3", "--alpha", "2.5", "--beta", "0.25", "--gamma", "0.25"]
    assert cli.main(["verify", *bad]) == 3
    assert cli.main(["build", *bad]) == 3


def test_env_tolerance(monkeypatch, capsys):
    monkeypatch.setenv("BLOCKENC_TOL", "1e-30")
    code, out = run(["verify", *CIRC], capsys)
    assert code == 1 and json.loads(out)["tolerance"] == 1e-30
    monkeypatch.setenv("BLOCKENC_TOL", "abc")
    assert cli.main(["verify", *CIRC]) == 2


def test_explicit_tolerance_beats_env(monkeypatch, capsys):
    monkeypatch.setenv("BLOCKENC_TOL", "1e-30")
    code, _ = run(["verify", *CIRC, "--tolerance", "1e-10"], capsys)
    assert code == 0


def test_sweep(tmp_path, capsys):
    configs = [
        {"family": "circulant", "n": 3, "alpha": 0.5, "beta": 0.25, "gamma": 0.25},
        {"family": "ebtree", "n": 3, "alpha": 0.5, "beta": 0.3, "gamma": 0.4},
        {"family": "walk", "n": 2, "alpha": 0.5, "beta": 0.25, "k": 2},
    ]
    f = tmp_path / "sweep.json"
    f.write_text(json.dumps(configs))
    code, out = run(["verify", "--sweep", str(f)], capsys)
    reports = json.loads(out)
    assert code == 0 and [r["family"] for r in reports] == ["circulant", "ebtree", "walk"]
    configs.append({"family": "circulant", "n": 3, "alpha": 3.0, "beta": 0.25, "gamma": 0.25})
    f.write_text(json.dumps(configs))
    code, out = run(["verify", "--sweep", str(f)], capsys)
    assert code == 3 and "error" in json.loads(out)[-1]


def test_qsp_cheb_rescale(tmp_path, capsys):
    code, out = run(["qsp", "--cheb-rescale", "2", "4", "--output-dir", str(tmp_path)], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["norm"] == 31.0 and rep["residual"] <= 1e-10
    phases = PhaseFactors.from_text((tmp_path / "phases.txt").read_text())
    assert list(phases.phases) == rep["phases"]


def test_qsp_target(tmp_path, capsys):
    code, out = run(["qsp", "--target", "0,1", "--output-dir", str(tmp_path)], capsys)
    assert code == 0 and json.loads(out)["max_grid_error"] <= 1e-8


@pytest.mark.parametrize(
    "argv",
    [
        ["qsp", "--target", "0.5,0.5"],
        ["qsp", "--target", "0,2"],
        ["qsp"],
        ["qsp", "--target", "0,1", "--degree", "3"],
        ["qsp", "--target", "0,x"],
    ],
)
def test_qsp_bad_targets(argv, tmp_path):
    assert cli.main([*argv, "--output-dir", str(tmp_path)]) == 2


def test_qsp_solver_failure_exit_4(monkeypatch, tmp_path, capsys):
    def fail(target, tol):
        raise PhaseSolverError("stalled", 0.5, PhaseFactors((0.0, 0.0)))

    monkeypatch.setattr(cli.qsp, "solve_phases", fail)
    code, out = run(["qsp", "--target", "0,1", "--output-dir", str(tmp_path)], capsys)
    assert code == 4 and json.loads(out)["best_residual"] == 0.5
    assert not (tmp_path / "phases.txt").exists()


def test_parse_config_text():
    assert cli.parse_config_text("a = 1\n# c\nb=x # tail\n") == {"a": "1", "b": "x"}
    with pytest.raises(cli.ConfigError):
        cli.parse_config_text("no equals sign")
    with pytest.raises(cli.ConfigError):
        cli.parse_config_text("{bad json")
    with pytest.raises(cli.ConfigError):
        cli.normalize_config({"family": "circulant", "n": "three", "alpha": 1, "beta": 1, "gamma": 1})


def test_qasm_from_build_reproduces_unitary(tmp_path, capsys):
    run(["build", *CIRC, "--output-dir", str(tmp_path)], capsys)
    b = cli.build_encoding(cli.normalize_config({"family": "circulant", "n": 3, "alpha": 0.5, "beta": 0.25, "gamma": 0.25}))
    back = from_qasm((tmp_path / "circuit.qasm").read_text())
    assert (circuit_unitary(back) == b.encoding.unitary()).all()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "blockenc", "verify", *CIRC],
        capture_output=True, text=True, cwd=tmp_path, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["passed"]
