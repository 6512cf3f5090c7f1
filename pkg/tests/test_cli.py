"""Command-line interface: exit codes, formats and numerical agreement."""

import json
import math

import pytest

from tpa_metrology import StateSpec, cfi_tpa, qfi_tpa
from tpa_metrology.cli import main
from tpa_metrology.sweep import CSV_HEADER


def field(out, key):
    return float([ln for ln in out.splitlines() if ln.startswith(key)][0].split()[-1])


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_qfi_coherent(capsys):
    alpha = math.sqrt(2.0)
    code, out, _ = run_cli(
        ["qfi", "--state", "coherent", "--alpha", repr(alpha), "--epsilon", "0"], capsys
    )
    assert code == 0
    assert field(out, "qfi") == pytest.approx(10.0, rel=5e-3)


def test_cfi_squeezed_quadrature(capsys):
    code, out, _ = run_cli(
        [
            "cfi",
            "--state", "squeezed", "--r", "1",
            "--epsilon", "1e-8",
            "--measure", "quadrature", "--theta", "0",
        ],
        capsys,
    )
    assert code == 0
    assert field(out, "cfi") == pytest.approx(200.814780, rel=1e-2)


def test_json_output_full_precision(capsys):
    code, out, _ = run_cli(
        [
            "qfi", "--state", "squeezed", "--r", "0.8",
            "--epsilon", "1e-3", "--format", "json",
        ],
        capsys,
    )
    assert code == 0
    payload = json.loads(out)
    lib = qfi_tpa(StateSpec.squeezed(0.8), 1e-3)
    assert payload["qfi"] == lib.value  # bitwise
    assert payload["dim"] == lib.dim


def test_missing_required_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["qfi", "--state", "coherent", "--alpha", "1"])  # no --epsilon
    assert exc.value.code == 2


def test_mismatched_state_flags_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["qfi", "--state", "coherent", "--r", "1", "--epsilon", "0"])
    assert exc.value.code == 2


def test_engine_error_exits_1(capsys):
    code, _, err = run_cli(
        ["evolve", "--state", "fock", "--n", "60", "--dim", "32", "--epsilon", "0.1"], capsys
    )
    assert code == 1
    assert "error" in err


def test_evolve_reports_mean_photon(capsys):
    code, out, _ = run_cli(
        ["evolve", "--state", "coherent", "--alpha", "2", "--epsilon", "0"], capsys
    )
    assert code == 0
    assert field(out, "mean_photon") == pytest.approx(4.0, rel=1e-8)


def test_analytic_formulas(capsys):
    code, out, _ = run_cli(
        ["analytic", "--formula", "qfi_coherent", "--nbar", "2"], capsys
    )
    assert code == 0
    assert float(out.split()[-1]) == pytest.approx(10.0)
    code, out, _ = run_cli(
        ["analytic", "--formula", "cfi_quad_squeezed", "--r", "1", "--which", "squeezed_q"],
        capsys,
    )
    assert code == 0
    assert float(out.split()[-1]) == pytest.approx(200.814780, rel=1e-6)


def test_sensitivity_matches_closed_form(capsys):
    r = math.asinh(1.0)
    code, out, _ = run_cli(
        ["sensitivity", "--state", "squeezed", "--r", repr(r), "--epsilon", "0"], capsys
    )
    assert code == 0
    assert field(out, "sensitivity") == pytest.approx(0.25, rel=5e-3)


def test_exponent_command(capsys):
    code, out, _ = run_cli(
        [
            "exponent", "--state", "coherent", "--alpha", "2",
            "--epsilon", "1e-6", "--measure", "photon_number",
        ],
        capsys,
    )
    assert code == 0
    assert field(out, "exponent") == pytest.approx(3.0, abs=0.15)


def test_wigner_csv(tmp_path, capsys):
    out_path = tmp_path / "w.csv"
    code, out, _ = run_cli(
        [
            "wigner", "--state", "fock", "--n", "1",
            "--points", "101", "--half-width", "7", "--out", str(out_path),
        ],
        capsys,
    )
    assert code == 0
    assert "negativity" in out
    assert out_path.read_text().splitlines()[0] == "q,p,W"


def test_sweep_command(tmp_path, capsys):
    out_path = tmp_path / "fig2.csv"
    code, _, _ = run_cli(
        [
            "sweep", "--preset", "fig2", "--out", str(out_path),
            "--n-points", "3", "--nbar-max", "4",
        ],
        capsys,
    )
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) > 1


def test_cfi_matches_library(capsys):
    code, out, _ = run_cli(
        [
            "cfi", "--state", "coherent", "--alpha", "1.5",
            "--epsilon", "0.01", "--format", "json",
        ],
        capsys,
    )
    assert code == 0
    payload = json.loads(out)
    lib = cfi_tpa(StateSpec.coherent(1.5), 0.01, "photon_number")
    assert payload["cfi"] == lib.value
