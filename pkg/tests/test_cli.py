"""Workspace parsing, task runs, report determinism and the command line.

Arbitrary text must either parse or fail with a located error; identical
workspaces must give identical reports once timing is set aside.
"""

import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from eqcomp import cli

ROOT = Path(__file__).resolve().parent.parent
MINIMAL = """\
[frame H]
preset = 2

[doctrine P]
family = power
frame = H

[task]
check = elementary
doctrine = P
"""

CATEGORY = """\
[category C]
objects = x
terminal = x
arrows =
    i x x
    a x x
    b x x
identities =
    x i
compose =
    i i i
    i a a
    a i a
    i b b
    b i b
    a a b
    a b a
    b a b
    b b b
"""


def _strip(report):
    report = dict(report)
    report.pop("timing")
    return report


def test_minimal_workspace_parses_and_holds():
    ws = cli.parse_workspace(MINIMAL)
    assert [t.id for t in ws.tasks] == ["task1"]
    report = cli.run(ws)
    assert report["status"] == "holds"
    assert cli.exit_status(report) == 0
    assert report["tasks"][0]["reports"][0]["name"] == "elementary"


def test_dangling_reference_is_located():
    text = MINIMAL.replace("frame = H", "frame = K")
    with pytest.raises(cli.WorkspaceError) as e:
        cli.parse_workspace(text)
    assert e.value.line == 6
    assert e.value.column == 9
    assert "undeclared frame 'K'" in e.value.message


def test_non_associative_table_names_the_triple():
    with pytest.raises(cli.WorkspaceError) as e:
        cli.parse_workspace(CATEGORY)
    assert e.value.line == 10  # the compose table
    assert "triple (" in e.value.message


def test_associative_table_loads():
    text = """\
[category C]
objects = x t
terminal = t
arrows =
    i x x
    e x x
    j t t
    u x t
identities =
    x i
    t j
compose =
    i i i
    i e e
    e i e
    e e e
    j j j
    u i u
    u e u
    j u u
products =
    t t t j j
"""
    C = cli.parse_workspace(text).built["category", "C"]
    assert len(C.hom("x", "x")) == 2
    assert C.product("t", "t").carrier == "t"


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("[frame]\n", 1, "expected [frame <name>]"),
        ("[widget w]\n", 1, "unknown section kind"),
        ("x = 1\n", 1, "entry before any section"),
        ("[frame H]\n  1 2\n", 2, "outside a table"),
        ("[frame H]\npreset 2\n", 2, "expected 'key = value'"),
        ("[frame H]\npreset = 2\npreset = 2\n", 3, "duplicate key"),
        ("[frame H]\npreset = 7\n", 2, "unknown preset"),
        ("[task]\ndoctrine = P\n", 1, "task without a check"),
        (MINIMAL.replace("check = elementary", "check = nonsense"), 9, "unknown check"),
        ("[fragment f]\ncap = two\n", 2, "must be an integer"),
    ],
)
def test_located_errors(text, line, fragment):
    with pytest.raises(cli.WorkspaceError) as e:
        cli.parse_workspace(text)
    assert e.value.line == line
    assert fragment in e.value.message


def test_empty_task_list():
    report = cli.run(cli.parse_workspace("[frame H]\npreset = H3\n"))
    assert report["tasks"] == []
    assert report["status"] == "holds"
    assert cli.exit_status(report) == 0


def test_reports_are_deterministic():
    ws = cli.parse_workspace(MINIMAL)
    a, b = cli.run(ws), cli.run(cli.parse_workspace(MINIMAL))
    assert cli.dumps(_strip(a)) == cli.dumps(_strip(b))
    assert list(a) == ["format", "workspace_digest", "settings", "status", "counts", "tasks", "digest", "timing"]


def test_inputs_digest_tracks_referenced_sections():
    a = cli.run(cli.parse_workspace(MINIMAL))["tasks"][0]["inputs_digest"]
    other = MINIMAL + "\n[frame unused]\npreset = H3\n"
    b = cli.run(cli.parse_workspace(other))["tasks"][0]["inputs_digest"]
    c = cli.run(cli.parse_workspace(MINIMAL.replace("preset = 2", "preset = H3")))["tasks"][0]["inputs_digest"]
    assert a == b != c


def test_task_errors_are_recorded_and_run_continues():
    text = MINIMAL + "\n[task]\nid = broken\ncheck = quasitopos\n\n[task]\nid = after\ncheck = primary\ndoctrine = P\n"
    report = cli.run(cli.parse_workspace(text))
    statuses = [t["status"] for t in report["tasks"]]
    assert statuses == ["holds", "error", "holds"]
    assert "needs 'doctrine'" in report["tasks"][1]["error"]
    assert cli.exit_status(report) == 1


def test_mutation_workspace_fails_and_replays(tmp_path):
    out, cex = tmp_path / "r.json", tmp_path / "cex"
    code = cli.main(["check", str(ROOT / "workspaces" / "mutation.ws"), "--out", str(out), "--counterexamples", str(cex)])
    assert code == 1
    report = json.loads(out.read_text())
    assert report["counts"]["fails"] == len(report["tasks"]) == 8
    assert all(t["reports"][0]["counterexample"] for t in report["tasks"])
    assert (tmp_path / "r.md").read_text().startswith("# Check report")
    files = sorted(cex.iterdir())
    assert len(files) == 8
    ok, record = cli.replay(json.loads(files[0].read_text()))
    assert ok and record["status"] == "fails"
    assert cli.main(["replay", str(files[0])]) == 1


def test_parallel_run_matches_serial():
    ws = cli.parse_workspace((ROOT / "workspaces" / "mutation.ws").read_text())
    assert _strip(cli.run(ws, jobs=2)) == _strip(cli.run(ws))


def test_seed_changes_only_mutants():
    ws = cli.parse_workspace(MINIMAL)
    a, b = cli.run(ws, seed=0), cli.run(ws, seed=5)
    assert a["tasks"][0]["reports"] == b["tasks"][0]["reports"]


def test_export_and_build(tmp_path, capsys):
    path = tmp_path / "w.ws"
    path.write_text(MINIMAL + "\n[fragment f]\ncap = 1\n")
    assert cli.main(["export", "P", "--workspace", str(path), "--fragment", "f"]) == 0
    text = capsys.readouterr().out
    ws = cli.parse_workspace(text)
    P = ws.built["doctrine", "P"]
    assert [P.fiber(a).size() for a in P.base.objects(cli.Fragment())] == [1, 2]
    assert P.has("elementary")
    assert cli.main(["build", str(path)]) == 0
    built = json.loads(capsys.readouterr().out)
    assert {d["kind"] for d in built["declarations"]} == {"frame", "doctrine", "fragment"}


@pytest.mark.parametrize("family", ["power", "eqc", "subobjects", "weak_subobjects"])
@pytest.mark.parametrize("cap", [1, 2])
def test_export_round_trip_is_exact(family, cap):
    text = f"""\
[frame H]
preset = H3

[doctrine B]
family = power
frame = H

[doctrine P]
family = {family}
{"of = B" if family == "eqc" else "frame = H" if family != "weak_subobjects" else ""}

[fragment f]
cap = {cap}
"""
    once = cli.export(cli.parse_workspace(text), "P", "f")
    assert cli.export(cli.parse_workspace(once), "P", "f") == once


def test_exported_copy_passes_the_same_checks():
    ws = cli.parse_workspace(MINIMAL.replace("preset = 2", "preset = H3") + "\n[fragment f]\ncap = 1\n")
    copy = cli.parse_workspace(cli.export(ws, "P", "f")).built["doctrine", "P"]
    for prop in ["primary", "elementary", "existential", "universal"]:
        assert cli.D.verify(copy, prop, cli.Fragment()).holds, prop


def test_input_errors_exit_with_two(tmp_path, capsys):
    path = tmp_path / "bad.ws"
    path.write_text(MINIMAL.replace("frame = H", "frame = K"))
    assert cli.main(["check", str(path)]) == 2
    assert f"{path}:6:9: error: undeclared frame 'K'" in capsys.readouterr().err
    assert cli.main(["check", str(tmp_path / "missing.ws")]) == 2


LINES = st.sampled_from(
    ["[frame H]", "[doctrine P]", "[task]", "[fragment f]", "preset = 2", "family = power", "frame = H",
     "check = primary", "doctrine = P", "cap = 1", "order =", "  0 1", "elements = 0 1", "# note", "", "x", "= 3"]
)


@settings(max_examples=60, deadline=None)
@given(st.lists(LINES, max_size=12))
def test_any_text_parses_or_fails_with_location(lines):
    text = "\n".join(lines) + "\n"
    try:
        ws = cli.parse_workspace(text)
    except cli.WorkspaceError as e:
        assert 1 <= e.line <= max(1, len(lines))
        assert e.column >= 1
    else:
        assert all(t.check in cli.CHECKS for t in ws.tasks)
