import subprocess
import sys

import pytest

from treestack.cli import main
from treestack.fileformat import parse_descriptor
from treestack.fixtures import fixture_text


@pytest.fixture
def files(tmp_path):
    out = {}
    for name in ("example", "anbn"):
        p = tmp_path / f"{name}.tsa"
        p.write_text(fixture_text(name))
        out[name] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_validate(files, tmp_path, capsys):
    assert run(capsys, "validate", files["example"])[0] == 0
    bad = tmp_path / "bad.tsa"
    bad.write_text("states s\ninitial s\nfinal s\ntrans s eps true id t\n")
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1 and out.count("error:") == 1
    empty = tmp_path / "empty.tsa"
    empty.write_text("")
    assert run(capsys, "validate", str(empty))[0] == 2


def test_run_exit_codes(files, capsys):
    code, out, _ = run(capsys, "run", files["example"], "a a b c c d", "--k", "2", "--trace")
    assert code == 0
    assert out.startswith("accepted (21 transitions)")
    assert len(out.strip().splitlines()) == 22
    assert run(capsys, "run", files["example"], "a b d c", "--k", "2")[0] == 1
    assert run(capsys, "run", files["example"], "-", "--k", "2")[0] == 1
    assert run(capsys, "run", files["example"], "a z", "--k", "2")[0] == 2


def test_run_budget(files, capsys):
    code, out, _ = run(capsys, "run", files["example"], "a a b c c d", "--max-steps", "3")
    assert code == 3 and "max_steps" in out


def test_enumerate(files, capsys):
    code, out, _ = run(capsys, "enumerate", files["example"], "--max-len", "4", "--k", "2")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "# max_len 4 complete true"
    assert lines[2:] == ["a b c d"]
    code, out, _ = run(capsys, "enumerate", files["anbn"], "--max-len", "5")
    assert out.splitlines()[2:] == ["a b", "a a b b"]
    code, out, _ = run(capsys, "enumerate", files["anbn"], "--max-len", "0")
    assert out.splitlines()[2:] == []


def test_enumerate_is_deterministic(files, capsys):
    first = run(capsys, "enumerate", files["example"], "--max-len", "8")[1]
    assert run(capsys, "enumerate", files["example"], "--max-len", "8")[1] == first


def test_hash_writes_automaton(files, tmp_path, capsys):
    out = tmp_path / "hash.tsa"
    assert run(capsys, "hash", files["anbn"], "-N", "2", "-o", str(out))[0] == 0
    text = out.read_text()
    assert "# degree 4" in text
    assert run(capsys, "validate", str(out))[0] == 0
    code, listing, _ = run(capsys, "enumerate", str(out), "--max-len", "5")
    assert "#1 a b #2 #3" in listing.splitlines()


def test_perm_writes_descriptor(files, tmp_path, capsys):
    out = tmp_path / "perm.tsa"
    code, _, err = run(capsys, "perm", files["anbn"], "-N", "2", "--sigma", "2 1", "-o", str(out))
    assert code == 0 and "descriptor" in err
    desc = parse_descriptor(out.read_text())
    assert desc.claimed_k == 6 and desc.degree == 4 and desc.sigma == (2, 1)
    code, out_text, _ = run(
        capsys, "compare", str(out), "--oracle", files["anbn"], "-N", "2", "--sigma", "2 1",
        "--max-len", "6", "--max-nodes", "11",
    )
    assert code == 0, out_text
    assert out_text.strip().endswith("equal")


def test_closure_n1(files, tmp_path, capsys):
    out = tmp_path / "c1.tsa"
    assert run(capsys, "closure", files["anbn"], "-N", "1", "-o", str(out))[0] == 0
    code, text, _ = run(
        capsys, "compare", str(out), files["anbn"], "--max-len", "6", "--max-nodes", "7",
    )
    assert code == 0, text


def test_compare(files, capsys):
    assert run(capsys, "compare", files["example"], files["example"], "--max-len", "8")[0] == 0
    code, out, _ = run(capsys, "compare", files["anbn"], files["example"], "--max-len", "4")
    assert code == 1 and "< a b" in out and "> a b c d" in out
    assert run(capsys, "compare", files["anbn"], "--max-len", "4")[0] == 2


def test_fixture_prefix(capsys):
    assert run(capsys, "run", "fixture:singleton(abc)", "a b c")[0] == 0


def test_missing_file(capsys):
    assert run(capsys, "validate", "/nonexistent.tsa")[0] == 2


def test_console_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "treestack.cli", "run", files["anbn"], "a b"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("accepted")
