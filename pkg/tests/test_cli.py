import json
import math
import subprocess
import sys

import numpy as np

from exciton import cli, validate
from exciton.model import ModelParams


def run_cli(*argv, capsys):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, data


class TestSpectrum:
    def test_diagonal_sector_contains_stationary_eigenvalue(self, capsys):
        code, out, _ = run_cli("spectrum", "--n", "2", "--m", "2",
                               "--gamma0", "0.08", "--gamma1", "0", capsys=capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["source"] == "closed_form"
        assert any(abs(complex(v["re"], v["im"])) <= 1e-12
                   for v in doc["eigenvalues"])
        assert doc["trace_consistency"]["sum"]["mismatch"] <= 1e-10
        assert doc["trace_consistency"]["difference"]["mismatch"] >= 0.1

    def test_undamped_sector_is_degenerate_numerical(self, capsys):
        code, out, _ = run_cli("spectrum", "--n", "1", "--m", "1",
                               "--gamma0", "0", "--gamma1", "0", capsys=capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["source"] == "numerical"
        assert doc["degenerate"] is True
        values = sorted(round(v["im"], 9) for v in doc["eigenvalues"])
        assert values == [-2.0, 0.0, 0.0, 2.0]

    def test_dual_source_agreement(self, capsys):
        code, out, _ = run_cli("spectrum", "--n", "2", "--m", "3",
                               "--gamma0", "0.3", "--gamma1", "0.1",
                               "--source", "both", capsys=capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["comparison"]["max_eigenvalue_distance"] <= 1e-8

    def test_detuned_sector_is_numerical_without_report(self, capsys):
        code, out, _ = run_cli("spectrum", "--n", "2", "--m", "2",
                               "--delta", "0.5", capsys=capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["source"] == "numerical"
        assert doc["trace_consistency"] is None

    def test_canonical_diagonal_sector(self, capsys):
        # exercises the sharpened degeneracy check on the numerical path
        code, out, _ = run_cli("spectrum", "--n", "2", "--m", "2",
                               "--mode", "canonical", "--gamma0", "0.08",
                               capsys=capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["source"] == "numerical"
        assert doc["degenerate"] is False
        assert any(abs(complex(v["re"], v["im"])) <= 1e-10
                   for v in doc["eigenvalues"])

    def test_closed_source_outside_domain_is_usage_error(self, capsys):
        code, _, err = run_cli("spectrum", "--n", "2", "--m", "2",
                               "--delta", "0.5", "--source", "closed_form",
                               capsys=capsys)
        assert code == 2
        assert "source" in err


class TestEvolve:
    def test_stationary_observables_at_equal_rates(self, capsys):
        code, out, _ = run_cli("evolve", "--initial", "dressed:n=2",
                               "--gamma0", "0.7", "--gamma1", "0.7",
                               "--t-max", "3", "--dt", "0.25", capsys=capsys)
        assert code == 0
        header, data = read_csv(out)
        assert header[:3] == ["t", "W", "P"]
        assert np.abs(data[:, 1]).max() <= 1e-12
        assert np.abs(data[:, 2] - 0.5).max() <= 1e-12

    def test_rabi_oscillation(self, capsys):
        code, out, _ = run_cli("evolve", "--initial", "fock:photons=1,atom=0",
                               "--gamma0", "0", "--gamma1", "0",
                               "--t-max", "4", "--dt", "0.05", capsys=capsys)
        assert code == 0
        _, data = read_csv(out)
        assert np.abs(data[:, 1] + np.cos(2 * data[:, 0])).max() <= 1e-7

    def test_ode_matches_spectral(self, capsys):
        args = ("evolve", "--initial", "superposition:n=2,alpha=0.785398163397",
                "--gamma0", "0.08", "--gamma1", "0", "--mode", "canonical",
                "--t-max", "3", "--dt", "0.5")
        code, out_a, _ = run_cli(*args, "--method", "spectral", capsys=capsys)
        assert code == 0
        code, out_b, _ = run_cli(*args, "--method", "ode", "--n-max", "4",
                                 capsys=capsys)
        assert code == 0
        _, a = read_csv(out_a)
        _, b = read_csv(out_b)
        assert np.abs(a - b).max() <= 1e-6

    def test_file_initial_state_round_trip(self, capsys, tmp_path):
        doc = {"blocks": [
            {"n": 1, "m": 1, "re": [[0.25, 0.0], [0.0, 0.25]],
             "im": [[0.0, 0.0], [0.0, 0.0]]},
            {"n": 0, "m": 0, "re": [[0.5]], "im": [[0.0]]},
        ]}
        path = tmp_path / "state.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli("evolve", "--initial", f"file:{path}",
                               "--gamma0", "0.4", "--t-max", "1", "--dt", "0.5",
                               capsys=capsys)
        assert code == 0
        _, data = read_csv(out)
        assert np.abs(data[:, 3] - 1.0).max() <= 1e-12   # trace preserved

    def test_deterministic_output(self, capsys, tmp_path):
        args = ("evolve", "--initial", "dressed:n=2", "--gamma0", "1.2",
                "--t-max", "2", "--dt", "0.1")
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert run_cli(*args, "--output", str(out_a), capsys=capsys)[0] == 0
        assert run_cli(*args, "--output", str(out_b), capsys=capsys)[0] == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        assert b"\r" not in out_a.read_bytes()

    def test_bad_initial_spec_is_usage_error(self, capsys):
        code, _, err = run_cli("evolve", "--initial", "coherent:alpha=2",
                               capsys=capsys)
        assert code == 2 and "initial" in err

    def test_unknown_flag_exits_2(self, capsys):
        assert run_cli("evolve", "--initial", "dressed:n=2", "--bogus", "1",
                       capsys=capsys)[0] == 2

    def test_expm_overflow_exits_3(self, capsys):
        code, _, err = run_cli("evolve", "--initial", "dressed:n=2",
                               "--gamma0", "1.2", "--method", "expm",
                               "--t-max", "1e6", "--dt", "1e6", capsys=capsys)
        assert code == 3
        assert "numerical" in err


class TestFigures:
    def test_emits_files_and_manifest(self, capsys, tmp_path):
        outdir = tmp_path / "figs"
        code, _, _ = run_cli("figures", "--outdir", str(outdir),
                             "--t-max", "2", "--dt", "0.25", capsys=capsys)
        assert code == 0
        names = {p.name for p in outdir.iterdir()}
        expected = {f"fig{k}_{c}.csv" for k in (1, 2)
                    for c in ("gray", "black", "dashed", "dotted")}
        assert expected | {"manifest.json"} == names

        manifest = json.loads((outdir / "manifest.json").read_text())
        assert manifest["figure1"]["curves"]["dotted"]["gamma1"] == 1.2
        assert math.isclose(manifest["figure2"]["alpha"], math.pi / 4,
                            rel_tol=1e-9)
        # diagonal-sector scenario: printed and canonical observables agree;
        # the superposition scenario's coherence feels the mode difference
        dev1 = manifest["figure1"]["curves"]["dashed"]["max_deviation_from_canonical"]
        dev2 = manifest["figure2"]["curves"]["dashed"]["max_deviation_from_canonical"]
        assert dev1["W"] <= 1e-12 and dev1["P"] <= 1e-12
        assert dev2["P"] > 1e-3

        _, gray = read_csv((outdir / "fig1_gray.csv").read_text())
        assert np.abs(gray[:, 1]).max() <= 1e-12
        assert np.abs(gray[:, 2] - 0.5).max() <= 1e-12

    def test_deterministic_across_runs(self, capsys, tmp_path):
        snapshots = []
        for sub in ("one", "two"):
            outdir = tmp_path / sub
            assert run_cli("figures", "--outdir", str(outdir), "--t-max", "1",
                           "--dt", "0.5", capsys=capsys)[0] == 0
            snapshots.append({p.name: p.read_bytes()
                              for p in sorted(outdir.iterdir())})
        assert snapshots[0] == snapshots[1]

    def test_unwritable_outdir_exits_4(self, capsys, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("file, not a directory")
        code, _, err = run_cli("figures", "--outdir", str(blocker),
                               capsys=capsys)
        assert code == 4
        assert "I/O" in err


class TestValidate:
    def test_validate_passes_and_exits_0(self, capsys):
        code, out, _ = run_cli("validate", capsys=capsys)
        assert code == 0
        assert "[FAIL]" not in out
        assert "[PASS]" in out and "[INFO]" in out

    def test_injected_convention_flip_fails_trace_check(self, monkeypatch):
        # deliberate mutation: flip the combined-rate convention and make
        # sure the validator notices
        monkeypatch.setattr(ModelParams, "gamma_sum",
                            property(lambda self: self.gamma1 - self.gamma0))
        result = validate.check_trace_convention()
        assert result.failed


def test_console_script_end_to_end():
    proc = subprocess.run(
        [sys.executable, "-m", "exciton.cli", "spectrum", "--n", "1", "--m", "1",
         "--gamma0", "0.2", "--gamma1", "0.4"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    values = sorted((v["re"], v["im"]) for v in doc["eigenvalues"])
    assert math.isclose(values[0][0], -0.45, abs_tol=1e-9)
    proc = subprocess.run([sys.executable, "-m", "exciton.cli", "spectrum"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
