import csv
import io
import json
from contextlib import redirect_stdout

import pytest

from qdot.cli import main


def run_cli(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def parse_csv(text):
    metadata, rows = {}, []
    header = None
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(" = ")
            metadata[key] = value
        elif header is None:
            header = line.split(",")
        else:
            rows.append(next(csv.reader([line])))
    return metadata, header, rows


# --- poly ---------------------------------------------------------------------

def test_poly_basic_row():
    code, out = run_cli("poly", "--n", "1", "--l", "0")
    assert code == 0
    metadata, header, rows = parse_csv(out)
    assert metadata["asymptotic_root"] == "no"
    assert header[:4] == ["root_index", "t", "omega_ha", "eta_ha"]
    assert len(rows) == 1
    t, omega, eta = map(float, rows[0][1:4])
    assert t == pytest.approx(2**0.5, rel=1e-10)
    assert omega == pytest.approx(0.5, rel=1e-10)
    assert eta == pytest.approx(2.0, rel=1e-10)
    assert float(rows[0][5]) == pytest.approx(1.0)  # y_coeff_1


def test_poly_asymptotic_notice_for_even_degree():
    code, out = run_cli("poly", "--n", "2", "--l", "0")
    assert code == 0
    metadata, _, _ = parse_csv(out)
    assert metadata["asymptotic_root"].startswith("yes")


def test_poly_rejects_degree_zero():
    code, _ = run_cli("poly", "--n", "0", "--l", "0")
    assert code == 2


def test_poly_samples_are_normalized():
    code, out = run_cli("poly", "--n", "1", "--l", "0", "--samples", "4001")
    assert code == 0
    metadata, header, rows = parse_csv(out)
    assert header == ["r_bohr", "u"]
    assert len(rows) == 4001
    import numpy as np
    from scipy.integrate import simpson

    r = np.array([float(x[0]) for x in rows])
    u = np.array([float(x[1]) for x in rows])
    assert simpson(u * u, x=r) == pytest.approx(1.0, abs=1e-6)


def test_poly_samples_root_index_out_of_range():
    code, _ = run_cli("poly", "--n", "1", "--l", "0", "--samples", "10",
                      "--root-index", "5")
    assert code == 2


# --- spectrum -------------------------------------------------------------------

SPECTRUM_ARGS = ("spectrum", "--potential", "none", "--omega", "1.0", "--l", "0",
                 "--eta-min", "1.0", "--eta-max", "7.0",
                 "--rmax", "20", "--steps", "2000")


def test_spectrum_oscillator_and_round_trip():
    code, out = run_cli(*SPECTRUM_ARGS)
    assert code == 0
    metadata, header, rows = parse_csv(out)
    assert header == ["index", "eta_ha", "nodes"]
    etas = [float(r[1]) for r in rows]
    assert etas == pytest.approx([2.0, 6.0], rel=1e-4)
    # printed at 12 significant digits, so parsing loses nothing
    for row in rows:
        assert f"{float(row[1]):.12g}" == row[1]


def test_spectrum_json_matches_csv():
    code_c, out_c = run_cli(*SPECTRUM_ARGS)
    code_j, out_j = run_cli(*SPECTRUM_ARGS, "--format", "json")
    assert code_c == code_j == 0
    doc = json.loads(out_j)
    _, header, rows = parse_csv(out_c)
    assert doc["columns"] == header
    for json_row, csv_row in zip(doc["rows"], rows):
        assert json_row[0] == int(csv_row[0])
        assert json_row[1] == float(csv_row[1])
        assert json_row[2] == int(csv_row[2])


def test_spectrum_empty_window_notice():
    code, out = run_cli("spectrum", "--potential", "none", "--omega", "1.0",
                        "--l", "0", "--eta-min", "2.5", "--eta-max", "3.5",
                        "--rmax", "20", "--steps", "2000")
    assert code == 0
    metadata, _, rows = parse_csv(out)
    assert rows == []
    assert "no eigenvalues" in metadata["notice"]


def test_spectrum_waves_files(tmp_path):
    prefix = str(tmp_path / "osc")
    code, _ = run_cli(*SPECTRUM_ARGS, "--waves", prefix)
    assert code == 0
    import numpy as np
    from scipy.integrate import simpson

    text = (tmp_path / "osc.state0.csv").read_text()
    _, header, rows = parse_csv(text)
    assert header == ["r_bohr", "u"]
    r = np.array([float(x[0]) for x in rows])
    u = np.array([float(x[1]) for x in rows])
    assert simpson(u * u, x=r) == pytest.approx(1.0, abs=1e-6)


def test_spectrum_usage_errors():
    code, _ = run_cli("spectrum", "--potential", "maxwell", "--omega", "1.0",
                      "--eta-min", "0", "--eta-max", "1")
    assert code == 2
    code, _ = run_cli("spectrum", "--potential", "none")
    assert code == 2


def test_environment_defaults_and_flag_priority(monkeypatch):
    monkeypatch.setenv("QDOT_STEPS", "2000")
    monkeypatch.setenv("QDOT_RMAX", "20")
    code, out = run_cli("spectrum", "--potential", "none", "--omega", "1.0",
                        "--l", "0", "--eta-min", "1.0", "--eta-max", "3.0")
    assert code == 0
    metadata, _, _ = parse_csv(out)
    assert metadata["steps"] == "2000"
    code, out = run_cli("spectrum", "--potential", "none", "--omega", "1.0",
                        "--l", "0", "--eta-min", "1.0", "--eta-max", "3.0",
                        "--steps", "2500")
    metadata, _, _ = parse_csv(out)
    assert metadata["steps"] == "2500"


def test_numerical_failure_exit_code():
    code, _ = run_cli("spectrum", "--potential", "none", "--omega", "1.0",
                      "--l", "0", "--eta-min", "1e5", "--eta-max", "2e5",
                      "--rmax", "20", "--steps", "2000")
    assert code == 4


# --- bound ----------------------------------------------------------------------

def test_bound_finds_negative_state(tmp_path):
    prefix = str(tmp_path / "b")
    code, out = run_cli("bound", "--potential", "coulomb", "--omega", "0.01",
                        "--rmin", "0.002", "--rmax", "30", "--steps", "1501",
                        "--waves", prefix)
    assert code == 0
    metadata, _, rows = parse_csv(out)
    assert len(rows) == 1
    assert float(rows[0][1]) < -30.0
    assert "regularized" in metadata["note"]
    assert (tmp_path / "b.ground.csv").exists()


def test_bound_rejects_l_flag():
    code, _ = run_cli("bound", "--potential", "coulomb", "--omega", "0.01",
                      "--rmin", "0.002", "--l", "1")
    assert code == 2


# --- validate -------------------------------------------------------------------

def test_validate_table1_passes():
    code, out = run_cli("validate", "--table", "1")
    assert code == 0
    _, header, rows = parse_csv(out)
    assert header == ["report", "row", "inputs", "expected", "computed",
                      "rel_error", "status", "note"]
    assert len(rows) == 27
    assert all(r[6] == "pass" for r in rows)


def test_validate_poly_annotates_not_fails():
    code, out = run_cli("validate", "--table", "poly")
    assert code == 0
    _, _, rows = parse_csv(out)
    statuses = {r[1]: r[6] for r in rows}
    assert statuses["poly/n=3/l=0/y[3]"] == "annotated"
    assert statuses["poly/n=3/l=0/y[2]"] == "pass"
    assert not any(s == "fail" for s in statuses.values())


def test_validate_custom_expectations_can_fail(tmp_path):
    exp = tmp_path / "exp.txt"
    exp.write_text("table1/n=1/l=0 = 1.5\n")
    code, out = run_cli("validate", "--table", "1", "--expectations", str(exp))
    assert code == 1
    _, _, rows = parse_csv(out)
    assert rows[0][6] == "fail"


def test_validate_bound_inconclusive_exit_code(monkeypatch):
    from qdot import validate

    monkeypatch.setattr(validate, "_ground_energy", lambda kind, rmin: None)
    code, out = run_cli("validate", "--table", "bound")
    assert code == 3
    metadata, _, _ = parse_csv(out)
    assert metadata["inconclusive"] == "bound"
