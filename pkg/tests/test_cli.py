import io
import json
import math
from pathlib import Path

import pytest

from cli import main

SPEC_DIR = Path(__file__).resolve().parent.parent / "data" / "specs"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_exponent_ring():
    code, out, err = run("exponent", "ring", "--Q", "4", "--ell", "1000")
    assert code == 0 and err == ""
    data = json.loads(out)
    assert data["family"] == "RingOfIntegers"
    assert math.isclose(data["lambda_lower"], -1.27196767512214, abs_tol=1e-12)


def test_exponent_principal():
    code, out, _ = run("exponent", "principal", "--Q", "4", "--p", "59", "--r", "28")
    assert code == 0
    data = json.loads(out)
    assert data["ell"] == 81
    assert (data["p"], data["r"]) == (59, 28)
    assert math.isclose(data["lambda_lower"], -1.26532182282966, abs_tol=1e-12)


def test_exponent_congruence_reads_fractions_and_decimals():
    _, by_fraction, _ = run("exponent", "congruence", "--Q", "4", "--p", "11", "--r", "94",
                            "--y", "1/4000000000")
    _, by_decimal, _ = run("exponent", "congruence", "--Q", "4", "--p", "11", "--r", "94",
                           "--y", "2.5e-10")
    first, second = json.loads(by_fraction), json.loads(by_decimal)
    assert first == second
    assert first["y"] == "1/4000000000"
    assert first["ell"] == 19


def test_exponent_extended_precision_prints_strings():
    code, out, _ = run("exponent", "principal", "--Q", "4", "--p", "59", "--r", "28",
                       "--precision", "extended")
    assert code == 0
    value = json.loads(out)["lambda_lower"]
    assert isinstance(value, str)
    assert value.startswith("-1.265321822829659")


def test_exponent_text_format():
    code, out, _ = run("exponent", "rt-principal", "--p", "3", "--r", "2", "--format", "text")
    assert code == 0
    assert out.splitlines()[0].split() == ["family", "RTPrincipal"]


def test_table1_json():
    code, out, _ = run("table1", "--format", "json")
    assert code == 0
    rows = {row["row"]: row for row in json.loads(out)}
    assert rows["ell"]["principal"] == 161
    assert rows["ell"]["congruence"] == 19
    assert rows["lambda"]["congruence"] > rows["lambda"]["principal"]


def test_primes_csv():
    code, out, _ = run("primes", "--limit", "7")
    assert code == 0
    assert out.splitlines() == [
        "p,kind,t,Q",
        "2,Inert,2+0ω,4",
        "3,Ramified,1-1ω,3",
        "5,Inert,5+0ω,25",
        "7,Split,1-2ω,7",
    ]


def test_search_with_config(tmp_path):
    config = tmp_path / "grid.json"
    config.write_text(json.dumps({"prime_limit_Q": 7, "prime_limit_q": 13, "r_min": 2, "r_max": 40}))
    dump = tmp_path / "grid.csv"
    code, out, _ = run("search", "principal", "--config", str(config), "--threads", "1",
                       "--dump", str(dump))
    assert code == 0
    data = json.loads(out)
    assert data["evaluations"] == 480
    lines = dump.read_text().splitlines()
    assert lines[0] == "Q,p,r,y,stage,ell,lambda_lower"
    assert len(lines) == 481


@pytest.mark.parametrize("name", ["q3_z3_l1.spec", "q3_z3_l2.spec", "q3_a2_augmented_l0.spec"])
def test_construct_verify(spec_dir, name):
    code, out, err = run("construct", "--spec", str(spec_dir / name), "--verify", "--window", "4")
    assert code == 0, err
    data = json.loads(out)
    assert data["verified"] is True
    assert data["d_E2_measured"] >= data["required_d_E2"] - 1e-9
    assert "density_check" in data


def test_construct_verify_without_window():
    code, out, _ = run("construct", "--spec", str(SPEC_DIR / "q4_z4_l1.spec"), "--verify")
    assert code == 0
    data = json.loads(out)
    assert data["M_list"] == [4]
    assert math.isclose(data["d_E2_measured"], 4.0)
    assert "density_check" not in data


@pytest.mark.parametrize("argv,exit_code,kind", [
    (["exponent"], 2, "UsageError"),
    (["exponent", "principal", "--Q", "4"], 2, "UsageError"),
    (["frobnicate"], 2, "UsageError"),
    (["exponent", "congruence", "--Q", "4", "--p", "11", "--r", "94", "--y", "0"], 3, "InvalidArgumentError"),
    (["exponent", "principal", "--Q", "4", "--p", "11", "--r", "3"], 3, "InvalidArgumentError"),
    (["exponent", "principal", "--Q", "5", "--p", "11", "--r", "4"], 3, "InvalidArgumentError"),
    (["exponent", "ring", "--Q", "4", "--ell", "1", "--precision", "extended", "--dps", "10"], 2, "UsageError"),
    (["construct", "--spec", "no/such/file.spec"], 7, "SpecFileError"),
    (["construct", "--spec", str(SPEC_DIR / "q4_z4_l1.spec"), "--cap", "2"], 6, "CapExceededError"),
])
def test_error_exit_codes(argv, exit_code, kind):
    code, out, err = run(*argv)
    assert code == exit_code
    assert out == ""
    assert err.startswith(f"error kind={kind} code={exit_code} message=")
    assert err.count("\n") == 1
