import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bentbook import formats
from bentbook.cli import main
from bentbook.codebook import spreading_matrix
from bentbook.quadperm import Perm

from conftest import FIXTURES


def run(*argv):
    return main([str(a) for a in argv])


def load(path):
    return json.loads(path.read_text())


# --- search


def test_search_n4_with_reference_order(tmp_path):
    out = tmp_path / "s"
    assert run("search", "--n", 4, "--min-size", 6, "--order", FIXTURES / "is4_reference_order.json", "--out", out) == 0
    assert (out / "table.txt").read_text() == (FIXTURES / "composition_is4.txt").read_text()
    sets = load(out / "sets.json")
    assert sets["count"] == 32 and all(len(s) == 6 for s in sets["sets"])
    assert load(out / "is.json")["is_size"] == 12
    man = load(out / "manifest.json")
    assert man["command"] == "search" and set(man["outputs"]) >= {"is.json", "table.txt", "sets.json"}
    assert man["outputs"]["sets.json"] == formats.sha256_file(out / "sets.json")


def test_search_small_and_guarded(tmp_path, capsys):
    assert run("search", "--n", 2, "--out", tmp_path / "a") == 0
    assert load(tmp_path / "a" / "is.json")["is_size"] == 0
    assert run("search", "--n", 12, "--out", tmp_path / "b") == 2
    assert "--force" in capsys.readouterr().err
    assert run("search", "--n", 6, "--guard", 5, "--out", tmp_path / "c") == 2


def test_search_order_must_match(tmp_path):
    bad = tmp_path / "bad.json"
    formats.write_set(bad, [Perm.identity(4)])
    assert run("search", "--n", 4, "--order", bad, "--out", tmp_path / "o") == 3


# --- extend


def test_extend_self_m2_matches_reference(tmp_path, reference):
    out = tmp_path / "e"
    assert run("extend", FIXTURES / "pi1.json", "--self", "--m", 2, "--out", out) == 0
    perms, prov = formats.read_set(out / "extended.json")
    assert [p.to_list() for p in perms] == reference["self_m2"]
    assert load(out / "report.json")["r_min"] == 8
    assert run("extend", FIXTURES / "pi1.json", "--self", "--m", 1, "--deep", "--out", tmp_path / "m1") == 0
    assert formats.read_set(tmp_path / "m1" / "extended.json")[0] == formats.read_set(FIXTURES / "pi1.json")[0]


def test_extend_mixed_reference_base(tmp_path, reference):
    out = tmp_path / "x"
    assert run("extend", FIXTURES / "mixed_base_n4.json", "--mixed", "--partner", FIXTURES / "pi3.json", "--out", out) == 0
    payload = load(out / "extended.json")
    assert payload["candidates"] == 36 and payload["count"] == 4
    assert sorted(reference["mixed_n8"]) in [sorted(s) for s in payload["sets"]]
    assert payload["provenance"]["experimental"] is False


def test_extend_usage_and_verification_errors(tmp_path):
    bad = tmp_path / "bad.json"
    formats.write_set(bad, [Perm.identity(4), Perm.of(3, 4, 1, 2), Perm.of(3, 1, 4, 2)])
    assert run("extend", bad, "--self", "--m", 2, "--out", tmp_path / "o") == 3
    pi1 = FIXTURES / "pi1.json"
    assert run("extend", pi1, "--out", tmp_path / "o") == 2
    assert run("extend", pi1, "--self", "--mixed", "--m", 2, "--out", tmp_path / "o") == 2
    assert run("extend", pi1, "--mixed", "--out", tmp_path / "o") == 2
    assert run("extend", tmp_path / "missing.json", "--self", "--m", 2, "--out", tmp_path / "o") == 1


# --- codebook


def test_codebook_pi1(tmp_path):
    out = tmp_path / "c"
    assert run("codebook", FIXTURES / "pi1.json", "--out", out) == 0
    m = load(out / "metrics.json")
    assert (m["N"], m["K"], m["L"], m["coherence"], m["r_min"]) == (16, 96, 6, "1/4", 4)
    assert m["papr_max_grid"] <= 2 + 1e-9 and m["papr_upper_bound"] >= m["papr_max_grid"]
    cols, header = formats.read_codebook_csv(out / "codebook.csv")
    assert cols.shape == (16, 96) and header[0] == "l1_c0" and header[-1] == "l6_c15"


def test_codebook_metrics_only_large(tmp_path):
    ext = tmp_path / "m4"
    assert run("extend", FIXTURES / "pi1.json", "--self", "--m", 4, "--out", ext) == 0
    out = tmp_path / "c"
    assert run("codebook", ext / "extended.json", "--format", "metrics-only", "--out", out) == 0
    m = load(out / "metrics.json")
    assert (m["N"], m["K"], m["coherence"]) == (65536, 393216, "1/256")
    assert m["papr_max_grid"] is None and not (out / "codebook.csv").exists()
    assert run("codebook", ext / "extended.json", "--format", "csv", "--out", out) == 2


def test_codebook_errors(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"n": 4, "perms": []}))
    assert run("codebook", empty, "--out", tmp_path / "o") == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run("codebook", broken, "--out", tmp_path / "o") == 1
    assert run("codebook", FIXTURES / "pi1.json", "--oversample", 2, "--out", tmp_path / "o") == 2


# --- verify


@pytest.mark.parametrize("kind", ["set", "golay", "papr", "codebook"])
def test_verify_kinds_pass(kind, capsys):
    assert run("verify", FIXTURES / "pi1.json", "--kind", kind) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS") and "FAIL" not in out


def test_verify_materialised_codebooks(tmp_path):
    for fmt in ("csv", "bin"):
        out = tmp_path / fmt
        assert run("codebook", FIXTURES / "pi1.json", "--format", fmt, "--out", out) == 0
        path = out / f"codebook.{fmt}"
        assert run("verify", path, "--kind", "codebook") == 0
        assert run("verify", path, "--kind", "papr") == 0


def test_verify_failures(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    formats.write_set(bad, [Perm.identity(4), Perm.of(3, 1, 4, 2), Perm.of(2, 4, 1, 3)])
    assert run("verify", bad, "--kind", "set") == 3
    out = capsys.readouterr().out
    assert "FAIL" in out and "first failing pair" in out
    cols = spreading_matrix(formats.read_set(FIXTURES / "pi1.json")[0]).columns.copy()
    cols[0, 1] *= -1
    broken = tmp_path / "broken.bin"
    formats.write_codebook_bin(broken, cols)
    assert run("verify", broken, "--kind", "codebook") == 3
    ones = tmp_path / "ones.csv"
    formats.write_codebook_csv(ones, np.ones((4, 4), dtype=np.int8), 4)
    assert run("verify", ones, "--kind", "papr") == 3


def test_usage_exit_codes():
    assert run("frobnicate") == 2
    assert run("verify", "x", "--kind", "nope") == 2


# --- determinism and formats


def test_outputs_are_deterministic(tmp_path):
    for k in (1, 2):
        assert run("search", "--n", 4, "--out", tmp_path / f"s{k}") == 0
        assert run("codebook", FIXTURES / "pi1.json", "--format", "bin", "--out", tmp_path / f"c{k}") == 0
    for name in ("s{}/is.json", "s{}/table.txt", "s{}/sets.json", "c{}/codebook.bin", "c{}/metrics.json"):
        assert (tmp_path / name.format(1)).read_bytes() == (tmp_path / name.format(2)).read_bytes()
    m1, m2 = load(tmp_path / "c1" / "manifest.json"), load(tmp_path / "c2" / "manifest.json")
    assert m1["outputs"] == m2["outputs"]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 4).flatmap(lambda n: st.tuples(st.just(1 << n), st.integers(1, 4))), st.randoms())
def test_codebook_file_round_trips(shape, rnd):
    N, L = shape
    cols = np.array([[rnd.choice((1, -1)) for _ in range(N * L)] for _ in range(N)], dtype=np.int8)
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        formats.write_codebook_csv(d / "c.csv", cols, N)
        formats.write_codebook_bin(d / "c.bin", cols)
        got, header = formats.read_codebook_csv(d / "c.csv")
        assert np.array_equal(got, cols) and len(header) == N * L
        assert np.array_equal(formats.read_codebook_bin(d / "c.bin"), cols)
        assert np.array_equal(formats.read_codebook(d / "c.bin"), cols)


def test_set_file_round_trip(tmp_path, rho):
    path = tmp_path / "set.json"
    formats.write_set(path, rho, {"name": "IS_4 and identity"})
    perms, prov = formats.read_set(path)
    assert perms == rho and prov == {"name": "IS_4 and identity"}
    # int lists stay on one line
    assert "[1, 2, 3, 4]" in path.read_text()


def test_console_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "bentbook.cli", "verify", str(FIXTURES / "pi1.json")],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and res.stdout.startswith("PASS")
