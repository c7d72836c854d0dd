"""End-to-end tests of the command-line interface.

``main(argv)`` is invoked in-process and returns the exit status; stdout and
stderr are captured.  Frozen table values come from the closed-form order
formulas and the hand-computed residue data used elsewhere in the suite.
"""

import csv
import io
import json
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout

import pytest

from arborgroups.cli import main
from arborgroups.dynamics import preimage_tree
from arborgroups.fields import build_field


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


# ---------------------------------------------------------------------------
# orders


def test_orders_32():
    code, out, _ = run_cli(["orders", "--r", "3", "--s", "2", "--nmax", "5"])
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["r", "s", "n", "log2_formula", "log2_closure",
                      "log2_predicate", "agree"]
    assert [row[3] for row in rows] == ["1", "3", "7", "13", "24"]
    assert all(row[6] == "true" for row in rows)
    # closure column filled through n = 5, predicate only while 2^nbits <= 2^15
    assert [row[4] for row in rows] == ["1", "3", "7", "13", "24"]
    assert [row[5] for row in rows] == ["1", "3", "7", "13", ""]


def test_orders_31_and_42():
    code, out, _ = run_cli(["orders", "--r", "3", "--s", "1", "--nmax", "5"])
    assert code == 0
    _, rows = parse_csv(out)
    assert [row[3] for row in rows] == ["1", "3", "7", "12", "22"]
    code, out, _ = run_cli(["orders", "--r", "4", "--s", "2", "--nmax", "4"])
    assert code == 0
    _, rows = parse_csv(out)
    assert [row[3] for row in rows] == ["1", "3", "7", "15"]


def test_orders_chebyshev_formula_only():
    code, out, _ = run_cli(["orders", "--r", "2", "--s", "1", "--nmax", "4"])
    assert code == 0
    _, rows = parse_csv(out)
    assert [row[3] for row in rows] == ["1", "3", "4", "5"]
    assert all(row[4] == "" and row[5] == "" for row in rows)


# ---------------------------------------------------------------------------
# count / kernels


def test_count_row():
    code, out, _ = run_cli(
        ["count", "--r", "3", "--s", "2", "--n", "4", "--variant", "tBp"]
    )
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["r", "s", "n", "variant", "count", "log2", "method", "seconds"]
    assert len(rows) == 1
    assert rows[0][:6] == ["3", "2", "4", "tBp", "8192", "13"]
    float(rows[0][7])  # seconds parses


def test_count_workers_sharded():
    code, out, _ = run_cli(
        ["count", "--r", "3", "--s", "2", "--n", "4", "--variant", "tBp",
         "--workers", "2"]
    )
    assert code == 0
    _, rows = parse_csv(out)
    assert rows[0][4] == "8192"
    assert rows[0][6] == "sharded"


def test_count_rejects_chebyshev_and_big_n():
    code, _, err = run_cli(["count", "--r", "2", "--s", "1", "--n", "3",
                            "--variant", "tBp"])
    assert code == 2
    assert "error" in err
    code, _, err = run_cli(["count", "--r", "3", "--s", "2", "--n", "6",
                            "--variant", "tBp"])
    assert code == 2


def test_kernels_table():
    code, out, _ = run_cli(["kernels", "--r", "3", "--s", "2", "--nmax", "5"])
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["r", "s", "n", "variant", "count", "log2", "method", "seconds"]
    assert [row[2] for row in rows] == ["2", "3", "4", "5"]
    # depth-5 refined kernel of the (3,2) portrait has 2^11 elements
    assert rows[-1][4] == str(1 << 11)
    assert rows[-1][5] == "11"


# ---------------------------------------------------------------------------
# find-params


def test_find_params_json():
    code, out, _ = run_cli(["find-params", "--r", "3", "--s", "2", "--pmax", "20"])
    assert code == 0
    found = json.loads(out)
    assert [(e["p"], e["c"]) for e in found] == [
        (7, 1), (11, 2), (11, 5), (13, 10), (17, 5), (19, 15),
    ]
    assert all(e["r"] == 3 and e["s"] == 2 for e in found)
    assert found[0]["orbit"] == [1, 2, 5]


# ---------------------------------------------------------------------------
# label / verify-identities


def test_label_tree_json(tmp_path):
    report_path = tmp_path / "report.json"
    code, out, _ = run_cli(
        ["label", "--p", "7", "--c", "1", "--x0", "4", "--depth", "4",
         "--report", str(report_path)]
    )
    assert code == 0
    tree = json.loads(out)
    assert set(tree) == {"p", "m", "modulus", "c", "x0", "depth", "portrait", "nodes"}
    assert tree["p"] == 7 and tree["m"] == 16
    assert tree["portrait"] == {"r": 3, "s": 2}
    assert len(tree["nodes"]) == 31  # 1 + 2 + 4 + 8 + 16, root included
    report = json.loads(report_path.read_text())
    assert report["case"] == "special"
    assert all(c["ok"] for c in report["checks"])


def test_label_raw_matches_direct_construction():
    code, out, _ = run_cli(
        ["label", "--p", "5", "--c", "2", "--x0", "0", "--depth", "3", "--raw"]
    )
    assert code == 0
    direct = preimage_tree(build_field(5, 3), 2, 0, 3).to_json()
    assert json.loads(out) == direct


def test_label_then_verify_roundtrip(tmp_path):
    tree_path = tmp_path / "tree.json"
    code, _, _ = run_cli(
        ["label", "--p", "5", "--c", "2", "--x0", "0", "--depth", "4",
         "--out", str(tree_path)]
    )
    assert code == 0
    code, out, _ = run_cli(["verify-identities", "--in", str(tree_path)])
    assert code == 0
    report = json.loads(out)
    assert report["case"] == "shorttail"
    assert all(c["ok"] for c in report["checks"])


def test_verify_detects_corruption(tmp_path):
    tree_path = tmp_path / "tree.json"
    run_cli(["label", "--p", "5", "--c", "2", "--x0", "0", "--depth", "4",
             "--out", str(tree_path)])
    doc = json.loads(tree_path.read_text())
    # swap one sibling pair of labels at the deepest level
    doc["nodes"]["aaaa"], doc["nodes"]["aaab"] = (
        doc["nodes"]["aaab"], doc["nodes"]["aaaa"],
    )
    tree_path.write_text(json.dumps(doc))
    code, out, _ = run_cli(["verify-identities", "--in", str(tree_path)])
    assert code == 1
    report = json.loads(out)
    assert any(not c["ok"] for c in report["checks"])


def test_verify_identities_from_params():
    code, out, _ = run_cli(
        ["verify-identities", "--p", "7", "--c", "1", "--x0", "4",
         "--depth", "5"]
    )
    assert code == 0
    report = json.loads(out)
    assert report["case"] == "special"
    assert report["swaps"]  # labeling happened and recorded its swaps


def test_case_override_warns():
    code, out, err = run_cli(
        ["verify-identities", "--p", "7", "--c", "1", "--x0", "4",
         "--depth", "4", "--case", "longtail"]
    )
    assert code == 0
    assert "warning" in err.lower()
    assert json.loads(out)["case"] == "longtail"


# ---------------------------------------------------------------------------
# frobenius


def test_frobenius_frozen_special7():
    code, out, _ = run_cli(
        ["frobenius", "--p", "7", "--c", "1", "--x0", "4", "--depth", "5"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["sigma"].startswith("AT")
    assert doc["membership"]["in_group"] is True
    assert doc["membership"]["p"] == 1
    assert doc["membership"]["r"] == 0
    assert doc["signs"] == {"zeta4": 1, "sqrt2": 0}
    assert [lv["parity_xor"] for lv in doc["levels"]] == [1, 1, 0, 0, 0]
    assert all(lv["ok"] for lv in doc["levels"])


def test_frobenius_shorttail():
    code, out, _ = run_cli(
        ["frobenius", "--p", "5", "--c", "2", "--x0", "0", "--depth", "4"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["membership"]["in_group"] is True
    assert doc["membership"]["p"] == 0
    assert doc["signs"]["sqrt2"] == 1


# ---------------------------------------------------------------------------
# homtest


def test_homtest_special_suites_and_determinism():
    argv = ["homtest", "--r", "3", "--s", "2", "--depth", "5",
            "--trials", "20", "--seed", "7"]
    code, out, _ = run_cli(argv)
    assert code == 0
    doc = json.loads(out)
    assert doc["seed"] == 7
    suites = doc["suites"]
    assert set(suites) == {"sgn22", "p-cocycle", "r-cocycle"}
    assert all(v["failures"] == 0 and v["trials"] == 20 for v in suites.values())
    code2, out2, _ = run_cli(argv)
    assert (code2, out2) == (code, out)  # byte-identical rerun


def test_homtest_shorttail_suites():
    code, out, _ = run_cli(
        ["homtest", "--r", "3", "--s", "1", "--depth", "5",
         "--trials", "10", "--seed", "1"]
    )
    assert code == 0
    suites = json.loads(out)["suites"]
    assert set(suites) == {"sgn22", "p-kernel", "r1-cocycle"}
    assert all(v["failures"] == 0 for v in suites.values())


def test_homtest_env_seed_fallback(monkeypatch):
    monkeypatch.setenv("ARBOR_SEED", "123")
    code, out, _ = run_cli(
        ["homtest", "--r", "4", "--s", "2", "--depth", "4", "--trials", "5"]
    )
    assert code == 0
    assert json.loads(out)["seed"] == 123


# ---------------------------------------------------------------------------
# mod2 / kummer


def test_mod2():
    code, out, _ = run_cli(["mod2", "--nmax", "12"])
    assert code == 0
    doc = json.loads(out)
    assert doc["nmax"] == 12
    assert doc["iterates_ok"] is True
    assert doc["portraits"] == {"3,1": True, "3,2": True, "4,2": True, "5,3": True}


def test_kummer_frozen():
    code, out, _ = run_cli(["kummer", "--p", "7", "--c", "1", "--x0", "4"])
    assert code == 0
    doc = json.loads(out)
    assert doc["discs"] == [3, 5, 1]
    assert doc["disc_chars"] == [-1, -1, 1]
    assert doc["rank"] == 1
    assert doc["condition_holds"] is False


# ---------------------------------------------------------------------------
# plumbing


def test_out_flag_writes_file(tmp_path):
    path = tmp_path / "orders.csv"
    code, out, _ = run_cli(
        ["orders", "--r", "3", "--s", "1", "--nmax", "3", "--out", str(path)]
    )
    assert code == 0
    assert out == ""
    header, rows = parse_csv(path.read_text())
    assert header[0] == "r" and len(rows) == 3


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        run_cli(["orders", "--bogus", "1"])
    assert exc.value.code == 2


def test_invalid_params_exit_2():
    # (7, 3) is periodic: no strictly preperiodic portrait
    code, _, err = run_cli(
        ["label", "--p", "7", "--c", "3", "--x0", "0", "--depth", "3"]
    )
    assert code == 2
    assert "error" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "arborgroups.cli", "mod2", "--nmax", "6"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["iterates_ok"] is True
