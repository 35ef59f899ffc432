"""The command-line interface: exit codes, output determinism, and the
yes / clean-no / operational-error convention (0 / 2 / 1)."""

import json

from graphfactor.cli import main
from graphfactor.hostgraphs import graph6_emit, complete_host


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# stats

def test_stats_complete_graph(capsys):
    g6 = graph6_emit(complete_host(5))
    code, out, _ = run(capsys, "stats", g6, "--p", "1/2")
    assert code == 0
    payload = json.loads(out)
    assert payload["x"] == {"K2": "10", "P2": "30", "K3": "10"}
    assert payload["hat_proportional"] is False


def test_stats_rejects_garbage_graph(capsys):
    code, _, err = run(capsys, "stats", "notgraph6~~~", "--p", "1/2")
    assert code == 1
    assert "error" in err


def test_density_must_be_rational(capsys):
    code, _, err = run(capsys, "check", "--kind", "pc", "--n", "8",
                       "--p", "0.5")
    assert code == 1
    assert "a/b" in err


# ---------------------------------------------------------------------------
# check

def test_check_pc_yes_no(capsys):
    code, out, _ = run(capsys, "check", "--kind", "pc", "--n", "8",
                       "--p", "1/2")
    assert code == 0 and json.loads(out)["verdict"] is True
    code, out, _ = run(capsys, "check", "--kind", "pc", "--n", "9",
                       "--p", "1/2")
    assert code == 2 and json.loads(out)["verdict"] is False


def test_check_hpc_branches(capsys):
    code, out, _ = run(capsys, "check", "--kind", "hpc+", "--n", "19683",
                       "--p", "1/3")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] is True and payload["D_square"] is True
    code, out, _ = run(capsys, "check", "--kind", "hpc-", "--n", "19683",
                       "--p", "1/3")
    assert code == 2
    assert json.loads(out)["verdict"] is False


def test_check_rejects_small_n(capsys):
    code, _, err = run(capsys, "check", "--kind", "hpc+", "--n", "4",
                       "--p", "1/2")
    assert code == 1 and "error" in err


# ---------------------------------------------------------------------------
# hyper scans

def test_find_hpc_brute(capsys):
    code, out, _ = run(capsys, "find-hpc", "--sign", "+", "--p", "1/3",
                       "--scan-max", "40000")
    assert code == 0
    ns = [int(w["n"]) for w in json.loads(out)]
    assert ns == [19683, 39366]


def test_find_hpc_pell_generator(capsys):
    code, out, _ = run(capsys, "find-hpc", "--sign", "+", "--p", "1/2",
                       "--pell", "--limit", "1")
    assert code == 0
    w = json.loads(out)[0]
    assert w["verdict"] is True and len(w["n"]) == 1567


def test_find_hpc_pell_honest_failure(capsys):
    code, _, err = run(capsys, "find-hpc", "--sign", "+", "--p", "1/5",
                       "--pell", "--cap", "100000")
    assert code == 1
    assert "unit power" in err


def test_smallest_hpc_half(capsys):
    code, out, _ = run(capsys, "smallest-hpc-half")
    assert code == 0
    assert out.strip().startswith("393269643") and len(out.strip()) == 391


# ---------------------------------------------------------------------------
# factor systems and permissibility

def test_ifs_command(capsys):
    code, out, _ = run(capsys, "ifs", "--n", "20", "--p", "2/5",
                       "--samples", "25")
    assert code == 0
    payload = json.loads(out)
    assert payload["verify"]["ok"] is True
    assert payload["verify"]["hosts_checked"] == 25
    assert payload["system"]["family"] == ["K2", "P2", "K3"]


def test_permissible_x_and_y(capsys):
    code, out, _ = run(capsys, "permissible", "--n", "8", "--p", "1/2",
                       "--x", "14,42,7")
    assert code == 0 and json.loads(out)["permissible"] is True
    code, out, _ = run(capsys, "permissible", "--n", "8", "--p", "1/2",
                       "--y", "0,0,0")
    assert code == 0
    payload = json.loads(out)
    assert payload["x"] == {"K2": "14", "P2": "42", "K3": "7"}
    code, out, _ = run(capsys, "permissible", "--n", "7", "--p", "1/2",
                       "--y", "0,0,0")
    assert code == 2


def test_permissible_argument_errors(capsys):
    code, _, err = run(capsys, "permissible", "--n", "8", "--p", "1/2")
    assert code == 1 and "exactly one" in err
    code, _, err = run(capsys, "permissible", "--n", "8", "--p", "1/2",
                       "--x", "1,2")
    assert code == 1 and "needs 3 values" in err


# ---------------------------------------------------------------------------
# distribution reports

def test_llt_exhaustive_json_and_csv(capsys):
    code, out, _ = run(capsys, "llt-exhaustive", "--n", "7", "--p", "1/2")
    assert code == 0
    payload = json.loads(out)
    assert payload["mode_x"] == [10, 24, 4]
    code, out, _ = run(capsys, "llt-exhaustive", "--n", "6", "--p", "1/2",
                       "--format", "csv", "--max-entries", "4")
    assert code == 0
    assert len(out.strip().splitlines()) == 5


def test_llt_mc_deterministic(capsys):
    args = ("llt-mc", "--n", "10", "--p", "1/2", "--samples", "2000",
            "--seed", "5")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args, "--workers", "4")
    assert code1 == code2 == 0
    assert out1 == out2


def test_char_fn_command(capsys):
    code, out, _ = run(capsys, "char-fn", "--n", "10", "--p", "1/2",
                       "--t", "0.1,0.0,-0.2", "--samples", "2000",
                       "--seed", "4")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) >= {"phi_x", "phi_z", "difference"}
    code, _, err = run(capsys, "char-fn", "--n", "10", "--p", "1/2",
                       "--t", "0.1", "--samples", "100")
    assert code == 1 and "needs 3 values" in err


# ---------------------------------------------------------------------------
# search and identity suite

def test_search_exhaustive_n8(capsys):
    code, out, _ = run(capsys, "search-proportional", "--n", "8",
                       "--p", "1/2", "--limit", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["count"] == 2169600
    assert len(payload["graphs"]) == 2


def test_verify_identities_small(capsys):
    code, out, _ = run(capsys, "verify-identities", "--max-vertices", "3",
                       "--p-list", "1/2")
    assert code == 0
    assert json.loads(out)["failures"] == []


# ---------------------------------------------------------------------------
# plumbing

def test_version_mentions_constant_digest(capsys):
    assert main(["--version"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("graphfactor ")
    assert "d5401b7e" in out


def test_output_file(tmp_path, capsys):
    dest = tmp_path / "verdict.json"
    code = main(["check", "--kind", "pc", "--n", "8", "--p", "1/2",
                 "--output", str(dest)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(dest.read_text())["verdict"] is True


def test_unknown_command_exits_one(capsys):
    assert main(["frobnicate"]) == 1
    assert main([]) == 1
