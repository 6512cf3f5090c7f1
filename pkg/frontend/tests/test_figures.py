"""Frontend tests: render every preset's CSV through the public interfaces.

The sweep CSVs are generated by invoking the engine's command-line tool as a
subprocess, so these tests exercise exactly the external contract (CSV schema
and CLI), never the engine's Python API.
"""

import subprocess
import sys

import pytest

from tpa_figures import EmptySelection, SchemaError, render
from tpa_figures.cli import main

PNG_MAGIC = b"\x89PNG\r\n"


def engine(args):
    subprocess.run(
        [sys.executable, "-m", "tpa_metrology.cli", *args],
        check=True,
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="session")
def csv_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("sweeps")
    engine(["sweep", "--preset", "fig2", "--n-points", "3", "--nbar-max", "4",
            "--out", str(root / "fig2.csv")])
    engine(["sweep", "--preset", "fig3", "--eps-points", "4",
            "--out", str(root / "fig3.csv")])
    engine(["sweep", "--preset", "fig4", "--heatmap-points", "3", "--nbar-max", "4",
            "--out", str(root / "fig4.csv")])
    engine(["sweep", "--preset", "fig5", "--eps-points", "4",
            "--out", str(root / "fig5.csv")])
    engine(["sweep", "--preset", "appendix_qfi", "--heatmap-points", "3", "--nbar-max", "4",
            "--out", str(root / "appendix_qfi.csv")])
    engine(["wigner", "--state", "fock", "--n", "1", "--points", "101",
            "--half-width", "7", "--out", str(root / "wigner.csv")])
    return root


CASES = [
    ("fig2.csv", "loglog_fi_vs_n"),
    ("fig3.csv", "fi_vs_epsilon"),
    ("fig4.csv", "exponent_heatmap"),
    ("fig5.csv", "fi_vs_epsilon"),
    ("appendix_qfi.csv", "fi_heatmap"),
    ("wigner.csv", "wigner_panel"),
]


@pytest.mark.parametrize("csv_name,kind", CASES)
def test_render_each_preset(csv_dir, tmp_path, csv_name, kind):
    out = tmp_path / f"{kind}.png"
    render(kind, csv_dir / csv_name, out)
    assert out.read_bytes()[: len(PNG_MAGIC)] == PNG_MAGIC


def test_render_deterministic(csv_dir, tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render("loglog_fi_vs_n", csv_dir / "fig2.csv", a)
    render("loglog_fi_vs_n", csv_dir / "fig2.csv", b)
    assert a.read_bytes() == b.read_bytes()


def test_corrupted_header_names_columns(csv_dir, tmp_path):
    lines = (csv_dir / "fig2.csv").read_text().splitlines()
    lines[0] = lines[0].replace("epsilon", "eps").replace("value", "val")
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError) as exc:
        render("loglog_fi_vs_n", bad, tmp_path / "x.png")
    assert "epsilon" in str(exc.value) and "value" in str(exc.value)


def test_empty_selection(csv_dir, tmp_path):
    # fig2 holds no exponent rows, so the exponent heatmap has nothing to show
    with pytest.raises(EmptySelection):
        render("exponent_heatmap", csv_dir / "fig2.csv", tmp_path / "x.png")


def test_cli_renders(csv_dir, tmp_path, capsys):
    out = tmp_path / "fig3.png"
    code = main(["plot", "--in", str(csv_dir / "fig3.csv"),
                 "--kind", "fi_vs_epsilon", "--out", str(out)])
    assert code == 0
    assert out.exists()


def test_cli_error_paths(csv_dir, tmp_path, capsys):
    assert main(["plot", "--in", str(tmp_path / "nope.csv"),
                 "--kind", "fi_vs_epsilon", "--out", str(tmp_path / "x.png")]) == 1
    # schema mismatch exits nonzero with the error class named
    assert main(["plot", "--in", str(csv_dir / "wigner.csv"),
                 "--kind", "loglog_fi_vs_n", "--out", str(tmp_path / "x.png")]) == 1
    err = capsys.readouterr().err
    assert "SchemaError" in err
    with pytest.raises(SystemExit) as exc:
        main(["plot", "--in", "a.csv", "--kind", "mystery", "--out", "x.png"])
    assert exc.value.code == 2
