"""End-to-end tests of the command-line interface."""

import json
from pathlib import Path

import pytest
import yaml

from covrisk.cli.render import render_risk_rows
from covrisk.main import run
from covrisk.models.risk import Coordinates, EstimatorKind, LossKind, RiskReport
from covrisk.models.run_config import OutputFormat
from covrisk.services.config import get_config, reload_config
from covrisk.services.estimators import load_calibration

RISK_ARGS = ["risk-table", "--p", "2", "--n", "6", "--replicates", "2000", "--seed", "7", "--format", "csv"]


def _run(capsys: pytest.CaptureFixture[str], argv: list[str]) -> tuple[int, str]:
    code = run(argv)
    return code, capsys.readouterr().out


def test_risk_table_csv_is_identical_across_worker_counts(
    capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
) -> None:
    """Test that the CSV output is byte-identical for 1 and 4 workers."""
    monkeypatch.setenv("COVRISK_SHARD_SIZE", "300")
    reload_config()
    argv = [*RISK_ARGS, "--estimators", "mle", "stein", "iwasawa_best", "geodesic_cholesky"]

    code_serial, serial = _run(capsys, ["--workers", "1", *argv])
    code_threaded, threaded = _run(capsys, ["--workers", "4", *argv])

    assert code_serial == code_threaded == 0
    assert serial == threaded
    lines = serial.splitlines()
    assert lines[0] == "estimator,loss,coordinates,analytic,formula,reference,mc_mean,mc_se,replicates,seed,flagged"
    assert len(lines) == 1 + 4 * 2
    assert lines[1].startswith("mle,stein,full,")


def test_risk_table_marks_missing_closed_forms(capsys: pytest.CaptureFixture[str]) -> None:
    """Test the missing marker in table output and an empty cell in CSV."""
    argv = ["risk-table", "--p", "2", "--n", "6", "--replicates", "2000", "--estimators", "geodesic_cholesky"]

    code, table = _run(capsys, [*argv, "--loss", "stein"])
    _, csv_out = _run(capsys, [*argv, "--loss", "stein", "--format", "csv"])

    assert code == 0
    assert "—" in table.splitlines()[1]
    assert csv_out.splitlines()[1].startswith("geodesic_cholesky,stein,full,,,,")


def test_risk_table_json(capsys: pytest.CaptureFixture[str]) -> None:
    code, out = _run(capsys, ["risk-table", "--p", "2", "--n", "5", "--replicates", "2000", "--format", "json"])

    payload = json.loads(out)
    assert code == 0
    assert payload["p"] == 2
    assert len(payload["rows"]) == 14
    by_key = {(row["estimator"], row["loss"]): row for row in payload["rows"]}
    assert by_key[("iwasawa_best", "stein")]["formula"] == "iwasawa-stein"
    references = {key: row["reference"] for key, row in by_key.items() if row["analytic"] is not None}
    assert references == {
        ("mle", "stein"): "eq4",
        ("stein", "stein"): "eq6",
        ("iwasawa_best", "stein"): "eq17",
        ("geodesic_iwasawa", "geodesic"): "sec3-I",
        ("iwasawa_best", "geodesic"): "sec3-I",
        ("geodesic_cholesky", "geodesic"): "sec3-II",
        ("stein", "geodesic"): "sec3-II",
        ("mle", "geodesic"): "sec3-II",
    }
    assert by_key[("rot_eq_stein", "geodesic")]["reference"] is None
    assert by_key[("rot_eq_stein", "geodesic")]["analytic"] is None


def test_render_carries_formula_and_reference() -> None:
    """Test that table, CSV and JSON rendering all show the closed form's tag and source reference."""
    row = RiskReport(
        estimator=EstimatorKind.IWASAWA_BEST,
        loss=LossKind.STEIN,
        p=3,
        n=10,
        analytic=0.25,
        formula="iwasawa-stein",
        reference="eq17",
        mc_mean=0.251,
        mc_se=0.002,
        replicates=100_000,
        seed=7,
        coordinates=Coordinates.STARRED,
    )

    csv_lines = render_risk_rows([row], OutputFormat.CSV, {}).splitlines()
    table = render_risk_rows([row], OutputFormat.TABLE, {})
    payload = json.loads(render_risk_rows([row], OutputFormat.JSON, {"p": 3}))

    header = csv_lines[0].split(",")
    cells = dict(zip(header, csv_lines[1].split(","), strict=True))
    assert cells["formula"] == "iwasawa-stein"
    assert cells["reference"] == "eq17"
    assert "eq17" in table
    assert payload["rows"][0]["reference"] == "eq17"
    assert payload["rows"][0]["formula"] == "iwasawa-stein"


def test_risk_table_creates_then_reuses_calibration(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    """Test that --calibration writes a missing file and reuses it on the next run."""
    calibration = tmp_path / "cal.json"
    argv = [
        *RISK_ARGS,
        "--estimators",
        "rot_eq_stein",
        "rot_eq_geodesic",
        "--calibration",
        str(calibration),
        "--calibration-replicates",
        "10000",
    ]

    code_first, first = _run(capsys, argv)
    assert calibration.exists()
    modified = calibration.stat().st_mtime_ns
    code_second, second = _run(capsys, argv)

    assert code_first == code_second == 0
    assert first == second
    assert calibration.stat().st_mtime_ns == modified
    assert load_calibration(calibration, 2, 6).replicates == 10_000


def test_risk_table_rejects_mismatched_calibration(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    calibration = tmp_path / "cal.json"
    assert run(["calibrate", "--p", "2", "--n", "5", "--replicates", "10000", "--output", str(calibration)]) == 0

    code, _ = _run(capsys, [*RISK_ARGS, "--estimators", "rot_eq_stein", "--calibration", str(calibration)])

    assert code == 2


def test_verify_json_passes(capsys: pytest.CaptureFixture[str]) -> None:
    """Test the verification battery end to end."""
    code, out = _run(
        capsys,
        ["verify", "--p", "2", "--n", "6", "--replicates", "4000", "--calibration-replicates", "10000", "--json"],
    )

    payload = json.loads(out)
    failing = [check for check in payload["checks"] if check["status"] not in ("pass", "info")]
    assert code == 0, failing
    assert payload["passed"] is True
    names = {check["name"] for check in payload["checks"]}
    assert "stein-ordering-analytic" in names
    assert "local-optimality:d1+" in names


def test_verify_with_too_few_replicates_fails(capsys: pytest.CaptureFixture[str]) -> None:
    code, out = _run(capsys, ["verify", "--p", "2", "--n", "6", "--replicates", "50"])

    assert code == 1
    assert "inconclusive" in out


def test_decompose_table_and_json(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    """Test Cholesky factor, pivots and eigenvalues of a small matrix."""
    matrix = tmp_path / "a.txt"
    matrix.write_text("# example\n2\n4 2\n2 3\n", encoding="utf-8")

    code, table = _run(capsys, ["decompose", str(matrix)])
    _, out = _run(capsys, ["decompose", str(matrix), "--format", "json"])

    assert code == 0
    assert "iwasawa pivots: 4 2" in table
    payload = json.loads(out)
    assert payload["iwasawa_pivots"] == [4.0, 2.0]
    assert payload["cholesky_factor"][0] == [2.0, 0.0]
    assert payload["eigenvalues"] == pytest.approx([(7 + 17**0.5) / 2, (7 - 17**0.5) / 2], rel=1e-12)


def test_decompose_exit_codes(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    """Test 1 for a non-SPD matrix and 2 for malformed or missing files."""
    indefinite = tmp_path / "indefinite.txt"
    indefinite.write_text("2\n1 2\n2 1\n", encoding="utf-8")
    malformed = tmp_path / "malformed.txt"
    malformed.write_text("2\n1 2\n2\n", encoding="utf-8")

    assert run(["decompose", str(indefinite)]) == 1
    assert run(["decompose", str(malformed)]) == 2
    assert run(["decompose", str(tmp_path / "missing.txt")]) == 2
    assert capsys.readouterr().out == ""


def test_usage_errors(capsys: pytest.CaptureFixture[str]) -> None:
    """Test exit code 2 for invalid dimensions and unknown arguments."""
    assert run(["risk-table", "--p", "5", "--n", "3"]) == 2
    assert run(["spectra", "--p", "1", "--n", "3"]) == 2
    with pytest.raises(SystemExit) as excinfo:
        run(["risk-table", "--p", "2", "--n", "3", "--estimators", "unknown"])
    assert excinfo.value.code == 2
    assert capsys.readouterr().out == ""


def test_sample_is_deterministic(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    """Test that equal seeds give equal draws and --sigma is honoured."""
    argv = ["sample", "--p", "2", "--n", "4", "--count", "3", "--seed", "9", "--format", "csv"]

    _, first = _run(capsys, argv)
    _, second = _run(capsys, argv)
    sigma = tmp_path / "sigma.txt"
    sigma.write_text("2\n2 0.5\n0.5 1\n", encoding="utf-8")
    code, scaled = _run(capsys, [*argv, "--sigma", str(sigma)])

    assert first == second
    assert first.splitlines()[0] == "draw,row,col,scatter,bartlett_factor"
    assert len(first.splitlines()) == 1 + 3 * 4
    assert code == 0
    assert scaled != first


def test_seed_from_config_file_and_environment(
    capsys: pytest.CaptureFixture[str], tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    """Test that the seed falls back to the config file, which COVRISK_SEED overrides."""
    config_path = tmp_path / "custom.yaml"
    config_path.write_text(yaml.dump({"monte_carlo": {"seed": 5}}), encoding="utf-8")
    argv = ["sample", "--p", "2", "--n", "3", "--format", "json"]

    _, from_file = _run(capsys, ["--config", str(config_path), *argv])
    _, explicit = _run(capsys, [*argv, "--seed", "5"])
    monkeypatch.setenv("COVRISK_SEED", "5")
    reload_config(tmp_path / "config.yaml")
    _, from_env = _run(capsys, argv)

    assert json.loads(from_file)["seed"] == 5
    assert from_file == explicit == from_env


def test_calibrate_writes_default_path(capsys: pytest.CaptureFixture[str]) -> None:
    """Test that calibrate writes under the configured data directory and prints the path."""
    code, out = _run(capsys, ["calibrate", "--p", "2", "--n", "5", "--replicates", "10000", "--seed", "3"])

    path = Path(out.strip())
    assert code == 0
    assert path == get_config().paths.get_calibration_path(2, 5, 3)
    assert load_calibration(path, 2, 5).seed == 3


def test_calibrate_below_minimum_is_a_usage_error() -> None:
    assert run(["calibrate", "--p", "2", "--n", "5", "--replicates", "100"]) == 2


def test_spectra_json(capsys: pytest.CaptureFixture[str]) -> None:
    code, out = _run(capsys, ["spectra", "--p", "3", "--n", "12", "--replicates", "2000", "--format", "json"])

    payload = json.loads(out)
    assert code == 0
    assert payload["ratio"] == 0.25
    assert payload["det_product_passed"] is True
    assert "marchenko_pastur_reference" in payload


def test_decompose_identity(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    matrix = tmp_path / "identity.txt"
    matrix.write_text("3\n1 0 0\n0 1 0\n0 0 1\n", encoding="utf-8")

    code, out = _run(capsys, ["decompose", str(matrix)])

    assert code == 0
    assert "cholesky factor:\n3\n1 0 0\n0 1 0\n0 0 1\n" in out
    assert "iwasawa pivots: 1 1 1" in out


def test_risk_table_at_p1_has_equal_stein_risks(capsys: pytest.CaptureFixture[str]) -> None:
    """Test that Mle, Stein and IwasawaBest share one closed-form Stein risk when p = 1."""
    argv = ["risk-table", "--p", "1", "--n", "10", "--replicates", "2000", "--loss", "stein", "--format", "json"]

    code, out = _run(capsys, [*argv, "--estimators", "mle", "stein", "iwasawa_best"])

    analytic = {row["analytic"] for row in json.loads(out)["rows"]}
    assert code == 0
    assert len(analytic) == 1
    assert analytic.pop() == pytest.approx(0.1033202440023004, abs=1e-12)
