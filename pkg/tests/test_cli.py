import io
import json
import re
import subprocess
import sys

import pytest

from mmwave_pathloss import analysis, registry
from mmwave_pathloss.cli import build_parser, main
from mmwave_pathloss.dataset import GenSpec, dump_csv, generate_synthetic, load_csv
from mmwave_pathloss.estimation import fit_ci
from mmwave_pathloss.models import CiParams, Environment, Scenario

GEN = ["gen", "--model", "ci", "--n", "3.4", "--sigma", "9.7", "--freq", "28", "--count", "100",
       "--dmin", "61", "--dmax", "186", "--seed", "7"]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def gen_csv(tmp_path, capsys):
    path = tmp_path / "d.csv"
    assert run(GEN + ["-o", str(path)], capsys)[0] == 0
    return path


def test_gen_rows_and_determinism(tmp_path, capsys, gen_csv):
    text = gen_csv.read_bytes()
    assert len(load_csv(text)) == 100
    other = tmp_path / "again.csv"
    assert run(GEN + ["-o", str(other)], capsys)[0] == 0
    assert other.read_bytes() == text
    assert b"\r" not in text


def test_gen_is_library_output(gen_csv):
    spec = GenSpec(CiParams(3.4), [(28.0, 100)], (61.0, 186.0), 9.7, 7,
                   scenario=Scenario("other", "synthetic"), environment=Environment.NLOS)
    assert gen_csv.read_text() == dump_csv(generate_synthetic(spec))


def test_fit_ci_json(gen_csv, capsys):
    code, out, _ = run(["fit", "--model", "ci", "--input", str(gen_csv), "--env", "nlos"], capsys)
    assert code == 0
    doc = json.loads(out)
    with open(gen_csv, "rb") as fh:
        expected = fit_ci(load_csv(fh)).to_dict()
    assert doc == expected
    assert "residuals" not in doc


def test_fit_verbose_residuals(gen_csv, capsys):
    code, out, _ = run(["fit", "--model", "ci", "--input", str(gen_csv), "--verbose"], capsys)
    assert len(json.loads(out)["residuals"]) == 100


def test_fit_filter_to_nothing_is_validation_error(gen_csv, capsys):
    code, _, err = run(["fit", "--model", "ci", "--input", str(gen_csv), "--env", "los"], capsys)
    assert code == 1
    assert "empty" in err


def test_fit_all_emits_report(gen_csv, capsys):
    code, out, _ = run(["fit", "--model", "all", "--input", str(gen_csv)], capsys)
    doc = json.loads(out)
    with open(gen_csv, "rb") as fh:
        assert doc == analysis.compare_models(load_csv(fh)).to_dict()
    assert {f["model"] for f in doc["fits"]} == {"FI", "CI", "CIF"}


def test_range_negative_slope(capsys):
    code, out, err = run(["range", "--model", "fi", "--alpha", "-0.8", "--beta", "115.6", "--max-pl", "140"], capsys)
    assert code == 1
    assert out == ""
    assert "not positive" in err


def test_range_ci(capsys):
    code, out, _ = run(["range", "--model", "ci", "--n", "2", "--freq", "28", "--max-pl", "121.39"], capsys)
    assert code == 0
    assert json.loads(out)["max_range_m"] == pytest.approx(1000.0, rel=1e-3)


def test_eval(capsys):
    code, out, _ = run(["eval", "--model", "cif", "--n", "3", "--b", "0.21", "--f0", "51",
                        "--freq", "73.5", "--dist", "10"], capsys)
    assert code == 0
    assert json.loads(out)["points"][0]["path_loss_db"] == pytest.approx(102.553, abs=1e-3)
    code, out, _ = run(["eval", "--model", "ci", "--n", "2", "--freq", "28", "--freq", "73.5",
                        "--dist", "1", "--dist", "10", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "frequency_ghz,distance_m,path_loss_db"
    assert len(out.splitlines()) == 5


def test_eval_domain_error(capsys):
    code, _, err = run(["eval", "--model", "ci", "--n", "2", "--freq", "28", "--dist", "0.5"], capsys)
    assert code == 1 and "distance must be >= 1 m" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["fit", "--model", "ci"],
        ["fit", "--model", "ci", "--input", "x.csv", "--bogus"],
        ["fit", "--model", "cif", "--input", "x.csv", "--f0", "auto", "--f0-ghz", "51"],
        ["gen", "--model", "ci", "--freq", "28", "--count", "5", "--dmin", "1", "--dmax", "5"],
        ["gen", "--model", "ci", "--n", "2", "--freq", "28", "--freq", "73.5", "--count", "5",
         "--count", "6", "--count", "7", "--dmin", "1", "--dmax", "5"],
        ["range", "--model", "ci", "--n", "2", "--max-pl", "100"],
        ["eval", "--model", "cif", "--n", "2", "--b", "0.1", "--f0", "auto", "--freq", "28", "--dist", "3"],
        [],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "usage:" in err


def test_missing_input_file(capsys, tmp_path):
    code, _, err = run(["fit", "--model", "ci", "--input", str(tmp_path / "nope.csv")], capsys)
    assert code == 1


def test_invalid_csv_reports_row(capsys, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("scenario,environment,frequency_ghz,distance_m,path_loss_db\numi_sc,nlos,28,0.5,90\n")
    code, _, err = run(["fit", "--model", "ci", "--input", str(p)], capsys)
    assert code == 1 and "row 2" in err


def test_stdin_input(monkeypatch, capsys, gen_csv):
    monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(gen_csv.read_bytes())))
    code, out, _ = run(["fit", "--model", "ci", "--input", "-"], capsys)
    assert code == 0 and json.loads(out)["n_samples"] == 100


def test_registry_verb(capsys):
    code, out, _ = run(["registry"], capsys)
    assert out == registry.export_csv()
    code, out, _ = run(["registry", "--scenario", "umi_sc", "--env", "los", "--model", "fi", "--format", "json"], capsys)
    rows = json.loads(out)
    assert [(r["freq_ghz_list"], r["ple_or_alpha_or_n"]) for r in rows] == [("28", "3.9"), ("73", "-0.8")]


def test_plot_verb(gen_csv, capsys, tmp_path):
    out_path = tmp_path / "p.svg"
    code, _, _ = run(["plot", "--input", str(gen_csv), "--model", "ci", "-o", str(out_path)], capsys)
    assert code == 0
    svg = out_path.read_text()
    assert svg.startswith("<?xml") and svg.count('class="fit"') == 1


def test_color_env(monkeypatch, gen_csv, capsys):
    monkeypatch.setenv("PLM_COLOR", "always")
    _, out, _ = run(["compare", "--input", str(gen_csv)], capsys)
    assert out.startswith("\x1b[1m")
    monkeypatch.setenv("PLM_COLOR", "never")
    _, out, _ = run(["compare", "--input", str(gen_csv)], capsys)
    assert "\x1b" not in out


FLAG = re.compile(r"(?<![\w-])--?[A-Za-z][\w-]*")


def _subparsers():
    parser = build_parser()
    action = next(a for a in parser._actions if a.choices and isinstance(a.choices, dict))
    return action.choices


@pytest.mark.parametrize("verb", ["fit", "eval", "gen", "compare", "range", "plot", "registry"])
def test_help_lists_every_flag(verb):
    sub = _subparsers()[verb]
    declared = {s for a in sub._actions for s in a.option_strings}
    documented = set(FLAG.findall(sub.format_help()))
    assert declared == documented


def test_module_entry_point(gen_csv):
    proc = subprocess.run([sys.executable, "-m", "mmwave_pathloss", "fit", "--model", "ci", "--input", str(gen_csv)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["model"] == "CI"
