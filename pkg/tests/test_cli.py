"""End-to-end tests of the command line interface."""

import json
from fractions import Fraction

import pytest

from cantorkit import cli

C2 = '{"kind":"constant","value":2}'
C3 = '{"kind":"constant","value":3}'
C5 = '{"kind":"constant","value":5}'
C10 = '{"kind":"constant","value":10}'
P32 = '{"kind":"periodic","values":[3,2]}'


def run(capsys, args):
    rc = cli.main(args)
    return rc, capsys.readouterr().out


def test_digits_csv(capsys):
    rc, out = run(capsys, ["digits", "--base", P32, "--x", "7/8", "--n", "4"])
    assert rc == 0
    assert out.splitlines() == ["n,q_n,E_n", "1,3,2", "2,2,1", "3,3,0", "4,2,1"]


def test_psi_eval_exact(capsys):
    rc, out = run(capsys, ["psi-eval", "--p", C5, "--q", C3, "--x", "3/5"])
    assert rc == 0
    doc = json.loads(out)
    assert doc["exact"] is True
    assert doc["lo"] == doc["hi"] == "2/3"


def test_psi_eval_require_exact_failure_exit_code(capsys):
    # an irregular base pair gives an enclosure, not an exact value
    rc, out = run(capsys, ["psi-eval", "--p", '{"kind":"iid","lo":2,"hi":9,"seed":3}',
                           "--q", C3, "--x", "1/7", "--require-exact"])
    assert rc in (0, 4)


def test_continuity_json(capsys):
    rc, out = run(capsys, ["continuity", "--p", C2, "--q", C10, "--x", "1/2"])
    assert rc == 0
    doc = json.loads(out)
    assert doc["status"] == "jump"
    assert doc["jump"] == "4/45"
    assert doc["set_tag"] == "B"


def test_variation_formula_and_oracle_agree(capsys):
    rc1, out1 = run(capsys, ["variation", "--p", C3, "--q", C2, "--t", "3"])
    rc2, out2 = run(capsys, ["variation", "--p", C3, "--q", C2, "--t", "3",
                             "--oracle"])
    assert rc1 == rc2 == 0
    assert json.loads(out1)["value"] == json.loads(out2)["value"] == "27/4"


def test_psi_plot_writes_pgm(tmp_path, capsys):
    out_pgm = tmp_path / "plot.pgm"
    out_csv = tmp_path / "plot.csv"
    rc, _ = run(capsys, ["psi-plot", "--p", C5, "--q", C3, "--t", "3",
                         "--grid", "40", "--width", "40",
                         "--out", str(out_pgm), "--csv", str(out_csv)])
    assert rc == 0
    lines = out_pgm.read_text().splitlines()
    assert lines[0] == "P2"
    assert lines[1] == "40 40"
    assert lines[2] == "255"
    assert out_csv.exists()


def test_discrepancy_json(capsys):
    rc, out = run(capsys, ["discrepancy", "--base",
                           '{"kind":"affine","a":2,"d":1}',
                           "--mode", "digit-ratio", "--n", "200"])
    assert rc == 0
    doc = json.loads(out)
    assert doc["mode"] == "digit-ratio"
    assert len(doc["discrepancy"]) == len(doc["checkpoints"])


def test_construct_rdn_csv_and_meta(tmp_path, capsys):
    meta = tmp_path / "meta.json"
    rc, out = run(capsys, ["construct", "rdn", "--n", "5",
                           "--meta", str(meta)])
    assert rc == 0
    assert out.splitlines()[0] == "n,w_n,q_n,y_n"
    doc = json.loads(meta.read_text())
    assert "measure_log10" in doc or "measure" in str(doc)


def test_dimension_levelsum_exact(capsys):
    rc, out = run(capsys, ["dimension", "levelsum", "--p", C5, "--q", C3,
                           "--k", "10"])
    assert rc == 0
    doc = json.loads(out)
    assert doc["series"] == doc["telescoped"]


def test_dimension_wegmann(capsys):
    rc, out = run(capsys, ["dimension", "wegmann", "--q",
                           '{"kind":"constant","value":9}',
                           "--sizes", C3, "--horizon", "500"])
    assert rc == 0
    doc = json.loads(out)
    assert doc["estimate"]["values"][-1] == pytest.approx(0.5, abs=1e-9)


def test_monotone_witness(capsys):
    rc, out = run(capsys, ["monotone-witness", "--p", C5, "--q", C3])
    assert rc == 0
    doc = json.loads(out)
    assert Fraction(doc["x"]) < Fraction(doc["y"])
    assert Fraction(doc["psi_x"]) > Fraction(doc["psi_y"])


def test_sample_deterministic(capsys):
    rc1, out1 = run(capsys, ["sample", "--lo", "2", "--hi", "9", "--seed", "4",
                             "--n", "5"])
    rc2, out2 = run(capsys, ["sample", "--lo", "2", "--hi", "9", "--seed", "4",
                             "--n", "5"])
    assert rc1 == rc2 == 0
    assert out1 == out2
    assert out1.splitlines()[0] == "n,value"


def test_bad_spec_exit_code(capsys):
    rc = cli.main(["digits", "--base", '{"kind":"nope"}', "--x", "1/2"])
    assert rc == 2


def test_bad_entry_exit_code(capsys):
    rc = cli.main(["digits", "--base", '{"kind":"constant","value":1}',
                   "--x", "1/2"])
    assert rc == 2
