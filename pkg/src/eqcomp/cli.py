"""Workspace files, task dispatch and report emission.

A workspace is a line-oriented text file::

    # comments start with a hash
    [frame H]
    preset = H3

    [doctrine P]
    family = power
    frame = H

    [fragment small]
    cap = 2

    [task]
    id = p-elementary
    check = elementary
    doctrine = P
    fragment = small

An entry whose value is empty opens a table: the indented lines that follow
are its rows, each split on whitespace.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import constructions as K
from . import doctrine as D
from . import lattice
from . import oracle as O
from . import topology as T
from .doctrine import rel_object
from .completions import (
    collapse_of_intensional,
    comprehension_completion,
    eqc,
    extensional_collapse,
    functional_completion,
    intensional_qc,
    quotients_of_collapse,
)
from .corpus import (
    FRAMES,
    FuzCategory,
    PowerDoctrine,
    PresentedDoctrine,
    SeparatedHSets,
    SubDoctrine,
    UMCategory,
    WeakSubobjects,
    fuz_to_comprehension,
    separated_to_eqc,
    um_to_eqc,
)
from .kernel import (
    CategoryError,
    FinSet,
    Fragment,
    PresentedCategory,
    PropertyReport,
    Tally,
    check_category_laws,
    combine,
    poset_category,
    to_jsonable,
)

REPORT_FORMAT = "eqcomp-report/1"
SECTION_KINDS = ("frame", "category", "doctrine", "topology", "fragment")
# entry keys that name another declaration, and the kind they point at
REFERENCES = {
    "frame": "frame",
    "category": "category",
    "doctrine": "doctrine",
    "of": "doctrine",
    "topology": "topology",
    "fragment": "fragment",
}


class WorkspaceError(Exception):
    """A parse or validation error located in the workspace text."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass
class Entry:
    key: str
    value: str
    line: int
    column: int
    rows: list = field(default_factory=list)  # (line, tokens)

    def raw(self) -> list:
        return [self.key, self.value, [toks for _, toks in self.rows]]


@dataclass
class Section:
    kind: str
    name: str
    line: int
    entries: dict = field(default_factory=dict)

    def get(self, key, default=None):
        e = self.entries.get(key)
        return default if e is None else e.value

    def raw(self) -> list:
        return [self.kind, self.name, [e.raw() for e in self.entries.values()]]


@dataclass
class Task:
    id: str
    check: str
    section: Section


@dataclass
class Workspace:
    text: str
    sections: dict  # (kind, name) -> Section
    tasks: list
    built: dict = field(default_factory=dict)


# ---------------------------------------------------------------- parsing


def _split_lines(text: str):
    sections: list[Section] = []
    current: Section | None = None
    table: Entry | None = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0] in " \t":
            if table is None:
                raise WorkspaceError(ln, 1, "indented row outside a table")
            table.rows.append((ln, line.split()))
            continue
        table = None
        if line.startswith("["):
            if not line.endswith("]"):
                raise WorkspaceError(ln, len(line), "unterminated section header")
            words = line[1:-1].split()
            if not words:
                raise WorkspaceError(ln, 2, "empty section header")
            kind = words[0]
            if kind == "task":
                if len(words) != 1:
                    raise WorkspaceError(ln, 2, "a task section takes no name")
                name = ""
            elif kind in SECTION_KINDS:
                if len(words) != 2:
                    raise WorkspaceError(ln, 2, f"expected [{kind} <name>]")
                name = words[1]
            else:
                raise WorkspaceError(ln, 2, f"unknown section kind {kind!r}")
            current = Section(kind, name, ln)
            sections.append(current)
            continue
        if "=" not in line:
            raise WorkspaceError(ln, 1, "expected 'key = value'")
        if current is None:
            raise WorkspaceError(ln, 1, "entry before any section")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise WorkspaceError(ln, 1, "missing key")
        if key in current.entries:
            raise WorkspaceError(ln, 1, f"duplicate key {key!r}")
        after = line.index("=") + 1
        col = after + 1 + len(line[after:]) - len(line[after:].lstrip()) if value else after + 1
        e = Entry(key, value, ln, col)
        current.entries[key] = e
        if not value:
            table = e
    return sections


def parse_workspace(text: str) -> Workspace:
    """Parse, resolve references and build every declaration; errors carry a location."""
    sections = _split_lines(text)
    by_name: dict = {}
    tasks: list[Task] = []
    for s in sections:
        if s.kind == "task":
            check = s.entries.get("check")
            if check is None or not check.value:
                raise WorkspaceError(s.line, 1, "task without a check")
            tid = s.get("id") or f"task{len(tasks) + 1}"
            if any(t.id == tid for t in tasks):
                raise WorkspaceError(s.entries["id"].line, 1, f"duplicate task id {tid!r}")
            tasks.append(Task(tid, check.value, s))
            continue
        if (s.kind, s.name) in by_name:
            raise WorkspaceError(s.line, 2, f"{s.kind} {s.name!r} declared twice")
        by_name[s.kind, s.name] = s
    for s in sections:
        for e in s.entries.values():
            kind = REFERENCES.get(e.key)
            if kind is None or not e.value:
                continue
            if s.kind == "doctrine" and e.key == "category" and e.value == "finset":
                continue
            if (kind, e.value) not in by_name:
                raise WorkspaceError(e.line, e.column, f"undeclared {kind} {e.value!r}")
    ws = Workspace(text, by_name, tasks)
    for kind, name in list(by_name):
        resolve(ws, kind, name)
    for t in tasks:
        if t.check not in CHECKS:
            e = t.section.entries["check"]
            raise WorkspaceError(e.line, e.column, f"unknown check {t.check!r}")
    return ws


def resolve(ws: Workspace, kind: str, name: str):
    key = (kind, name)
    if key in ws.built:
        if ws.built[key] is _BUILDING:
            s = ws.sections[key]
            raise WorkspaceError(s.line, 2, f"{kind} {name!r} depends on itself")
        return ws.built[key]
    s = ws.sections[key]
    ws.built[key] = _BUILDING
    try:
        obj = BUILDERS[kind](ws, s)
    except WorkspaceError:
        raise
    except (CategoryError, ValueError, KeyError) as exc:
        line = _blame(s, str(exc))
        raise WorkspaceError(line, 1, f"invalid {kind} {name!r}: {exc}") from None
    ws.built[key] = obj
    return obj


_BUILDING = object()

# which table a structure error most likely comes from
_BLAME = (("associative", "compose"), ("composition", "compose"), ("identit", "identities"), ("terminal", "terminal"))


def _blame(s: Section, message: str) -> int:
    for word, key in _BLAME:
        if word in message and key in s.entries:
            return s.entries[key].line
    return s.line


def _ref(ws: Workspace, s: Section, key: str, required: bool = True):
    e = s.entries.get(key)
    if e is None or not e.value:
        if required:
            raise WorkspaceError(s.line, 1, f"{s.kind} {s.name!r} needs '{key}'")
        return None
    return resolve(ws, REFERENCES[key], e.value)


def _int(s: Section, key: str, default: int | None = None) -> int | None:
    e = s.entries.get(key)
    if e is None:
        return default
    try:
        return int(e.value)
    except ValueError:
        raise WorkspaceError(e.line, e.column, f"'{key}' must be an integer") from None


def _flag(s: Section, key: str) -> bool:
    e = s.entries.get(key)
    if e is None:
        return False
    if e.value not in ("yes", "no", "true", "false"):
        raise WorkspaceError(e.line, e.column, f"'{key}' must be yes or no")
    return e.value in ("yes", "true")


def _rows(s: Section, key: str, width: int) -> list[list[str]]:
    e = s.entries.get(key)
    if e is None:
        return []
    if e.value:
        raise WorkspaceError(e.line, e.column, f"'{key}' is a table: put its rows on indented lines")
    for ln, toks in e.rows:
        if len(toks) != width:
            raise WorkspaceError(ln, 1, f"a '{key}' row has {width} fields, got {len(toks)}")
    return [toks for _, toks in e.rows]


def _build_frame(ws, s: Section):
    preset = s.get("preset")
    if preset is not None:
        if preset not in FRAMES:
            e = s.entries["preset"]
            raise WorkspaceError(e.line, e.column, f"unknown preset {preset!r}; known: {sorted(FRAMES)}")
        return FRAMES[preset]()
    names = (s.get("elements") or "").split()
    if not names:
        raise WorkspaceError(s.line, 1, f"frame {s.name!r} needs 'preset' or 'elements'")
    pairs = [tuple(r) for r in _rows(s, "order", 2)]
    return lattice.InfSemilattice.from_order(names, pairs, name=s.name)


def _build_category(ws, s: Section):
    if s.get("poset") is not None:
        e = s.entries["poset"]
        if ("frame", e.value) not in ws.sections:
            raise WorkspaceError(e.line, e.column, f"undeclared frame {e.value!r}")
        return poset_category(resolve(ws, "frame", e.value), name=s.name)
    objects = (s.get("objects") or "").split()
    arrows = {n: (a, b) for n, a, b in _rows(s, "arrows", 3)}
    ids = {o: n for o, n in _rows(s, "identities", 2)}
    comp = {(g, f): h for g, f, h in _rows(s, "compose", 3)}
    products = {(a, b): (p, l, r) for a, b, p, l, r in _rows(s, "products", 5)}
    pullbacks = {(f, g): (p, l, r) for f, g, p, l, r in _rows(s, "pullbacks", 5)}
    return PresentedCategory(
        s.name,
        objects,
        arrows,
        ids,
        comp,
        s.get("terminal"),
        products=products,
        pullbacks=pullbacks,
        weak_pullbacks=_flag(s, "weak_pullbacks"),
    )


def _build_doctrine(ws, s: Section):
    fam = s.get("family")
    if fam == "power":
        return PowerDoctrine(_ref(ws, s, "frame"))
    if fam == "subobjects":
        return SubDoctrine(_ref(ws, s, "frame"))
    if fam == "weak_subobjects":
        base = FinSet() if s.get("category", "finset") == "finset" else _ref(ws, s, "category")
        return WeakSubobjects(base, domain_cap=_int(s, "domain_cap", 2))
    if fam == "presented":
        C = _ref(ws, s, "category")
        fibers = {o: resolve(ws, "frame", fr) for o, fr in _rows(s, "fibers", 2)}
        tables: dict = {}
        for arrow, cod, dom in _rows(s, "reindex", 3):
            tables.setdefault(arrow, {})[cod] = dom
        deltas = {o: v for o, v in _rows(s, "equality", 2)}
        return PresentedDoctrine(
            s.name, C, fibers, tables, deltas or None, existential=_flag(s, "existential"), universal=_flag(s, "universal")
        )
    wrappers = {
        "eqc": eqc,
        "intensional": intensional_qc,
        "collapse": extensional_collapse,
        "comprehension": comprehension_completion,
        "functional": functional_completion,
    }
    if fam in wrappers:
        return wrappers[fam](_ref(ws, s, "of"))
    if fam == "closed":
        j = _ref(ws, s, "topology")
        return T.closed_subdoctrine(j.P, j)
    e = s.entries.get("family")
    where = (e.line, e.column) if e else (s.line, 1)
    raise WorkspaceError(*where, f"unknown doctrine family {fam!r}")


def _build_topology(ws, s: Section):
    P = _ref(ws, s, "doctrine")
    kind = s.get("kind", "double_negation")
    if kind == "identity":
        return T.identity_topology(P)
    if kind == "top":
        return T.top_topology(P)
    if kind == "double_negation":
        return T.double_negation(P)
    if kind == "canonical":
        return T.canonical_topology(P, domain_cap=_int(s, "domain_cap", 2))
    e = s.entries["kind"]
    raise WorkspaceError(e.line, e.column, f"unknown topology kind {kind!r}")


def _build_fragment(ws, s: Section):
    for key in s.entries:
        if key not in ("cap", "budget"):
            e = s.entries[key]
            raise WorkspaceError(e.line, 1, f"unknown fragment key {key!r}")
    return Fragment(cap=_int(s, "cap", 2), budget=_int(s, "budget", 4096))


BUILDERS = {
    "frame": _build_frame,
    "category": _build_category,
    "doctrine": _build_doctrine,
    "topology": _build_topology,
    "fragment": _build_fragment,
}


# ---------------------------------------------------------------- checks


@dataclass
class Context:
    ws: Workspace
    task: Task
    frag: Fragment
    seed: int

    def need(self, key: str):
        e = self.task.section.entries.get(key)
        if e is None:
            raise CategoryError(f"check {self.task.check!r} needs '{key}'")
        return resolve(self.ws, REFERENCES[key], e.value)

    def doctrine(self):
        return self.need("doctrine")

    def int(self, key: str, default=None):
        return _int(self.task.section, key, default)


def _parts(name: str, reports: dict) -> list[PropertyReport]:
    """A dict of named reports, flattened with the conjunction first."""
    out = [r for r in reports.values()]
    for k, r in zip(reports, out):
        r.name = k
    if name in reports:
        return [reports[name]] + [r for k, r in reports.items() if k != name]
    return [combine(name, out)] + out


def _property(prop):
    return lambda cx: [D.verify(cx.doctrine(), prop, cx.frag)]


def _category_laws(cx):
    if "category" in cx.task.section.entries:
        C = cx.need("category")
    else:
        C = cx.doctrine().base
    return [check_category_laws(C, cx.frag)]


def _quasitopos(cx):
    return _parts("quasitopos", K.check_quasitopos(cx.doctrine(), cx.frag, arrow_limit=cx.int("arrow_limit")))


def _coproducts(cx):
    return [K.check_coproducts(cx.doctrine(), cx.frag)]


def _closure_agreement(cx):
    P = cx.doctrine()
    a = cx.int("carrier", 2)
    t = Tally("closure_agreement")
    for rho in P.fiber(rel_object(P, a)).elements():
        fix = K.equiv_closure(P, a, rho, "fixpoint")
        formula = K.equiv_closure(P, a, rho, "tripos")
        if fix == formula:
            t.ok()
        else:
            t.fail(rho=rho, fixpoint=fix, formula=formula)
    return [t.report()]


def _coarse_reflection(cx):
    Q = cx.doctrine()
    reports = dict(K.check_coarse_reflection(Q, cx.frag))
    reports.update(K.check_coarse_comparisons(Q, cx.frag))
    return _parts("coarse_reflection", reports)


def _projective_core(cx):
    core = K.projective_core(cx.doctrine(), cx.frag)
    return [core.verdict] + list(core.reports.values())


def _decomposition(cx):
    P = cx.doctrine()
    Q = eqc(P)
    reports = {
        "collapse_of_intensional": O.check_equivalence(collapse_of_intensional(P, Q), cx.frag)["equivalence"],
        "quotients_of_collapse": O.check_equivalence(quotients_of_collapse(P, Q), cx.frag)["equivalence"],
    }
    return _parts("decomposition", reports)


def _fuzzy_sets(cx):
    H = cx.need("frame")
    P = PowerDoctrine(H)
    Cc = comprehension_completion(P)
    reports = {
        "um_vs_quotients": O.check_equivalence(um_to_eqc(UMCategory(H), eqc(P)), cx.frag)["equivalence"],
        "fuz_vs_comprehension": O.check_equivalence(fuz_to_comprehension(FuzCategory(H), Cc), cx.frag)["equivalence"],
        "separated_vs_quotients": O.check_equivalence(separated_to_eqc(SeparatedHSets(H), eqc(Cc)), cx.frag)[
            "equivalence"
        ],
    }
    return _parts("fuzzy_sets", reports)


def _topology_laws(cx):
    return _parts("topology", cx.need("topology").check(cx.frag))


def _retraction(cx):
    j = cx.need("topology")
    ar = getattr(j, "retraction", None)
    if ar is None:
        raise CategoryError("the topology does not come from an adjoint retraction")
    reports = dict(ar.check(cx.frag))
    reports["closed_iso"] = ar.check_closed_iso(cx.frag)
    return _parts("adjoint_retraction", reports)


def _separated(cx):
    j = cx.need("topology")
    ar = getattr(j, "retraction", None) or T.retraction_from_topology(j.P, j)
    reports = dict(T.check_lifted_adjunction(ar, cx.frag))
    reports.update(T.check_separated(ar, cx.frag))
    return _parts("separated", reports)


def _boolean_double_negation(cx):
    return _parts("agree", T.check_boolean_double_negation(cx.doctrine(), cx.frag))


def _pairs(objs):
    return [(x, y) for x in objs for y in objs]


def _first_rejection(name, attempts):
    """Run oracle attempts until one rejects; a mutant nobody rejects comes back as holding."""
    t_checked = 0
    last = None
    for where, run in attempts:
        r = run()
        t_checked += r.checked
        if r.fails:
            return [PropertyReport(name, "fails", {**where, **r.counterexample}, t_checked, r.skipped)]
        last = r
    note = "no attempt rejected the mutant"
    return [PropertyReport(name, "holds" if last else "not-checked", None, t_checked, 0, note)]


def _mutant_pairing(cx):
    C = cx.need("category") if "category" in cx.task.section.entries else cx.doctrine().base
    objs = C.objects(cx.frag)
    attempts = [
        ({"left": x, "right": y}, lambda x=x, y=y: O.check_universal(C, K.mutant_pairing(C, x, y, cx.seed), cx.frag))
        for x, y in _pairs(objs)
    ]
    return _first_rejection("mutant_pairing", attempts)


def _mutant_lambda(cx):
    return [D.verify(K.mutant_lambda(cx.doctrine(), cx.seed), "strong_classifier", cx.frag)]


def _mutant_coproduct(cx):
    Q = cx.doctrine()
    B = Q.base
    attempts = [
        ({"left": x, "right": y}, lambda x=x, y=y: O.check_universal(B, K.mutant_coproduct(B, x, y, cx.seed), cx.frag))
        for x, y in _pairs(B.objects(cx.frag))
    ]
    return _first_rejection("mutant_coproduct", attempts)


def _mutant_closure(cx):
    P = cx.doctrine()
    a = cx.int("carrier", 3)
    attempts = []
    for rho in P.fiber(rel_object(P, a)).elements():
        bad = K.mutant_closure(P, a, rho, cx.seed)
        if bad != K.equiv_closure(P, a, rho):
            attempts.append(({"carrier": a}, lambda rho=rho, bad=bad: K.check_closure(P, a, rho, bad, cx.frag)))
    return _first_rejection("mutant_closure", attempts)


CHECKS = {name: _property(name) for name in D.PROPERTIES}
CHECKS.update(
    {
        "category_laws": _category_laws,
        "quasitopos": _quasitopos,
        "coproducts": _coproducts,
        "closure_agreement": _closure_agreement,
        "coarse_reflection": _coarse_reflection,
        "projective_core": _projective_core,
        "decomposition": _decomposition,
        "fuzzy_sets": _fuzzy_sets,
        "topology": _topology_laws,
        "adjoint_retraction": _retraction,
        "separated": _separated,
        "boolean_double_negation": _boolean_double_negation,
        "mutant_pairing": _mutant_pairing,
        "mutant_lambda": _mutant_lambda,
        "mutant_coproduct": _mutant_coproduct,
        "mutant_closure": _mutant_closure,
    }
)


# ---------------------------------------------------------------- running


def _digest(obj) -> str:
    data = json.dumps(obj, ensure_ascii=False, separators=(",", ":")).encode()
    return hashlib.sha256(data).hexdigest()


def task_inputs(ws: Workspace, task: Task) -> list:
    """The task entries and every declaration they reach, in a fixed order."""
    seen: list = []
    todo = [task.section]
    out = []
    while todo:
        s = todo.pop(0)
        out.append(s.raw())
        for e in s.entries.values():
            kind = REFERENCES.get(e.key)
            if kind is None and s.kind == "category" and e.key == "poset":
                kind = "frame"
            if s.kind == "doctrine" and e.key == "fibers":
                refs = [("frame", toks[1]) for _, toks in e.rows]
            elif kind is not None and (kind, e.value) in ws.sections:
                refs = [(kind, e.value)]
            else:
                refs = []
            for key in refs:
                if key not in seen:
                    seen.append(key)
                    todo.append(ws.sections[key])
    return out


def run_task(ws: Workspace, task: Task, budget: int | None = None, seed: int = 0) -> tuple[dict, float]:
    start = time.perf_counter()
    frag = Fragment()
    if "fragment" in task.section.entries:
        frag = resolve(ws, "fragment", task.section.get("fragment"))
    if budget is not None:
        frag = replace(frag, budget=budget)
    cx = Context(ws, task, frag, _int(task.section, "seed", seed))
    record = {
        "id": task.id,
        "check": task.check,
        "inputs_digest": _digest([task_inputs(ws, task), budget, cx.seed]),
        "status": "holds",
        "reports": [],
        "error": None,
    }
    try:
        reports = CHECKS[task.check](cx)
    except (CategoryError, ValueError, KeyError, WorkspaceError) as exc:
        record["status"] = "error"
        record["error"] = f"{type(exc).__name__}: {exc}"
    else:
        record["reports"] = [r.to_dict() for r in reports]
        head = reports[0]
        record["status"] = head.status
    return record, time.perf_counter() - start


def _run_indexed(args):
    text, index, budget, seed = args
    ws = parse_workspace(text)
    return run_task(ws, ws.tasks[index], budget, seed)


def run(ws: Workspace, budget: int | None = None, seed: int = 0, jobs: int = 1, only: str | None = None) -> dict:
    """Run the tasks in declaration order and assemble the report."""
    indices = [i for i, t in enumerate(ws.tasks) if only is None or t.id == only]
    if jobs > 1 and len(indices) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_indexed, [(ws.text, i, budget, seed) for i in indices]))
    else:
        results = [run_task(ws, ws.tasks[i], budget, seed) for i in indices]
    records = [r for r, _ in results]
    counts = {s: sum(r["status"] == s for r in records) for s in ("holds", "fails", "not-checked", "error")}
    report = {
        "format": REPORT_FORMAT,
        "workspace_digest": _digest(ws.text),
        "settings": {"budget": budget, "seed": seed},
        "status": "holds" if counts["holds"] == len(records) else "fails",
        "counts": counts,
        "tasks": records,
    }
    report["digest"] = _digest(report)
    report["timing"] = {"tasks": {r["id"]: round(s, 3) for r, s in results}, "total": round(sum(s for _, s in results), 3)}
    return report


def exit_status(report: dict) -> int:
    return 0 if report["status"] == "holds" else 1


def dumps(report: dict) -> str:
    return json.dumps(report, ensure_ascii=False, indent=2) + "\n"


def summary(report: dict) -> str:
    """Markdown rendering of a report."""
    lines = [
        "# Check report",
        "",
        f"Overall: **{report['status']}**  ",
        "Tasks: " + ", ".join(f"{v} {k}" for k, v in report["counts"].items() if v),
        "",
        "| task | check | status | checked | skipped |",
        "|---|---|---|---|---|",
    ]
    for r in report["tasks"]:
        head = r["reports"][0] if r["reports"] else {"checked": 0, "skipped": 0}
        lines.append(f"| {r['id']} | {r['check']} | {r['status']} | {head['checked']} | {head['skipped']} |")
    for r in report["tasks"]:
        if r["status"] == "error":
            lines += ["", f"## {r['id']}", "", f"Error: `{r['error']}`"]
        elif r["status"] == "fails":
            cex = r["reports"][0]["counterexample"]
            lines += ["", f"## {r['id']}", "", "```json", json.dumps(cex, ensure_ascii=False), "```"]
    return "\n".join(lines) + "\n"


def counterexample_files(ws: Workspace, report: dict) -> dict[str, dict]:
    """One replayable document per failing task."""
    out = {}
    by_id = {t.id: t for t in ws.tasks}
    for r in report["tasks"]:
        if r["status"] != "fails":
            continue
        out[r["id"]] = {
            "format": "eqcomp-counterexample/1",
            "task": r["id"],
            "check": by_id[r["id"]].check,
            "settings": report["settings"],
            "counterexample": r["reports"][0]["counterexample"],
            "workspace": ws.text,
        }
    return out


def replay(doc: dict) -> tuple[bool, dict]:
    """Rerun the task behind a counterexample; True when the same counterexample comes back."""
    ws = parse_workspace(doc["workspace"])
    settings = doc.get("settings", {})
    report = run(ws, settings.get("budget"), settings.get("seed", 0), only=doc["task"])
    if not report["tasks"]:
        raise WorkspaceError(1, 1, f"no task {doc['task']!r} in the embedded workspace")
    record = report["tasks"][0]
    got = record["reports"][0]["counterexample"] if record["reports"] else None
    return got == doc["counterexample"], record


_TOKEN = re.compile(r"[^\s#\[\]]+")


def _names(items, prefix: str) -> list[str]:
    """Keep printable unique names, otherwise number everything."""
    raw = [str(x) for x in items]
    if len(set(raw)) == len(raw) and all(_TOKEN.fullmatch(r) for r in raw):
        return raw
    return [f"{prefix}{i}" for i in range(len(items))]


def _table(key: str, rows: list) -> list[str]:
    if not rows:
        return []
    return [f"{key} ="] + ["    " + " ".join(r) for r in rows]


def export(ws: Workspace, doctrine: str, fragment: str | None) -> str:
    """A declared doctrine on a fragment, written back as a presented workspace.

    The base is cut down to the fragment objects plus the terminal object.
    Products are kept when their carrier survives the cut, and equality is
    kept on the objects whose square survives.  Exporting the result again
    gives the same bytes.
    """
    if ("doctrine", doctrine) not in ws.sections:
        raise WorkspaceError(1, 1, f"undeclared doctrine {doctrine!r}")
    P = resolve(ws, "doctrine", doctrine)
    frag, frag_name = Fragment(), "all"
    if fragment is not None:
        if ("fragment", fragment) not in ws.sections:
            raise WorkspaceError(1, 1, f"undeclared fragment {fragment!r}")
        frag, frag_name = resolve(ws, "fragment", fragment), fragment
    C = P.base
    try:
        objs = list(C.objects(frag))
        t = C.terminal().carrier
        if t not in objs:
            objs.append(t)
        obj_name = dict(zip(objs, _names(objs, "o")))
        arrows = []
        for a in objs:
            for b in objs:
                fs = D._homs(C, a, b, frag.budget)
                if fs is None:
                    raise WorkspaceError(1, 1, f"hom({a}, {b}) exceeds the budget {frag.budget}")
                arrows.extend(fs)
        arrow_name = dict(zip(arrows, _names([f.data for f in arrows], "f")))
        fibers = {}
        for a in objs:
            elems = D._small(P.fiber(a), frag.budget)
            if elems is None:
                raise WorkspaceError(1, 1, f"fiber over {a} exceeds the budget {frag.budget}")
            names = getattr(P.fiber(a), "names", None)
            shown = [names[x] for x in elems] if names is not None else elems
            fibers[a] = (elems, dict(zip(elems, _names(shown, "e"))))
        products = {}
        for a in objs:
            for b in objs:
                try:
                    w = C.product(a, b)
                except CategoryError:
                    continue
                if w.carrier in obj_name:
                    products[a, b] = w
        lines = [f"# {doctrine} on fragment {frag_name}, written out as tables", ""]
        lines += [f"[fragment {frag_name}]", f"cap = {frag.cap}", f"budget = {frag.budget}", ""]
        for a in objs:
            elems, en = fibers[a]
            F = P.fiber(a)
            covers = [
                (en[x], en[y])
                for x in elems
                for y in elems
                if x != y and F.le(x, y) and not any(z not in (x, y) and F.le(x, z) and F.le(z, y) for z in elems)
            ]
            lines += [f"[frame {doctrine}@{obj_name[a]}]", "elements = " + " ".join(en[x] for x in elems)]
            lines += _table("order", covers) + [""]
        lines += [f"[category {doctrine}@base]", "objects = " + " ".join(obj_name[a] for a in objs)]
        lines += [f"terminal = {obj_name[t]}"]
        lines += _table("arrows", [(arrow_name[f], obj_name[f.src], obj_name[f.dst]) for f in arrows])
        lines += _table("identities", [(obj_name[a], arrow_name[C.identity(a)]) for a in objs])
        comp = [
            (arrow_name[g], arrow_name[f], arrow_name[C.compose(g, f)])
            for f in arrows
            for g in arrows
            if g.src == f.dst
        ]
        lines += _table("compose", comp)
        lines += _table(
            "products",
            [
                (obj_name[a], obj_name[b], obj_name[w.carrier], arrow_name[w.legs[0]], arrow_name[w.legs[1]])
                for (a, b), w in products.items()
            ],
        )
        lines += [""]
        lines += [f"[doctrine {doctrine}]", "family = presented", f"category = {doctrine}@base"]
        lines += _table("fibers", [(obj_name[a], f"{doctrine}@{obj_name[a]}") for a in objs])
        reindex = []
        for f in arrows:
            if f == C.identity(f.src):
                continue
            (_, dom), (cod_elems, cod) = fibers[f.src], fibers[f.dst]
            reindex += [(arrow_name[f], cod[y], dom[P.reindex(f, y)]) for y in cod_elems]
        lines += _table("reindex", reindex)
        if P.has("elementary"):
            eq = [(obj_name[a], fibers[products[a, a].carrier][1][P.delta(a)]) for a in objs if (a, a) in products]
            lines += _table("equality", eq)
        for cap in ("existential", "universal"):
            if P.has(cap):
                lines += [f"{cap} = yes"]
    except CategoryError as exc:
        raise WorkspaceError(1, 1, f"cannot export {doctrine!r}: {exc}") from exc
    return "\n".join(lines) + "\n"


def build_summary(ws: Workspace) -> dict:
    """What each declaration turned into."""
    out = []
    for (kind, name), obj in ws.built.items():
        entry = {"kind": kind, "name": name}
        if kind == "frame":
            entry["elements"] = list(obj.names)
            entry["frame"] = obj.check_frame().holds
        elif kind == "category":
            entry["objects"] = len(obj.objects(Fragment()))
        elif kind == "doctrine":
            entry["base"] = obj.base.name
            entry["capabilities"] = sorted(obj.capabilities)
        elif kind == "topology":
            entry["doctrine"] = obj.P.name
        elif kind == "fragment":
            entry["cap"], entry["budget"] = obj.cap, obj.budget
        out.append(entry)
    return {"declarations": out, "tasks": [{"id": t.id, "check": t.check} for t in ws.tasks]}


# ---------------------------------------------------------------- command line


def _load(path: str) -> Workspace:
    text = Path(path).read_bytes().decode("utf-8")
    return parse_workspace(text)


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eqcomp", description="Build and check doctrines and their completions.")
    ap.add_argument("--budget", type=int, default=None, help="largest fiber or hom-set a check may enumerate")
    ap.add_argument("--jobs", type=int, default=1, help="tasks run in parallel; reports merge in declaration order")
    ap.add_argument("--seed", type=int, default=0, help="seed for mutation tasks")
    sub = ap.add_subparsers(dest="command", required=True)
    b = sub.add_parser("build", help="parse a workspace and build its declarations")
    b.add_argument("workspace")
    c = sub.add_parser("check", help="run the tasks of a workspace")
    c.add_argument("workspace")
    c.add_argument("--out", help="write the JSON report here instead of stdout")
    c.add_argument("--summary", help="write the markdown summary here (default: next to --out)")
    c.add_argument("--counterexamples", help="directory for one replayable file per failing task")
    e = sub.add_parser("export", help="write a doctrine on a fragment back out as a presented workspace")
    e.add_argument("doctrine")
    e.add_argument("--workspace", required=True)
    e.add_argument("--fragment")
    r = sub.add_parser("replay", help="rerun the task behind a counterexample file")
    r.add_argument("counterexample")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "build":
            ws = _load(args.workspace)
            _write(None, dumps(build_summary(ws)))
            return 0
        if args.command == "check":
            ws = _load(args.workspace)
            report = run(ws, args.budget, args.seed, max(1, args.jobs))
            _write(args.out, dumps(report))
            md = args.summary or (str(Path(args.out).with_suffix(".md")) if args.out else None)
            if md:
                Path(md).write_text(summary(report), encoding="utf-8")
            else:
                sys.stderr.write(summary(report))
            if args.counterexamples:
                d = Path(args.counterexamples)
                d.mkdir(parents=True, exist_ok=True)
                for tid, doc in counterexample_files(ws, report).items():
                    (d / f"{tid}.json").write_text(dumps(doc), encoding="utf-8")
            return exit_status(report)
        if args.command == "export":
            ws = _load(args.workspace)
            _write(None, export(ws, args.doctrine, args.fragment))
            return 0
        if args.command == "replay":
            doc = json.loads(Path(args.counterexample).read_text(encoding="utf-8"))
            same, record = replay(doc)
            verdict = "reproduced" if same else ("changed" if record["status"] == "fails" else "gone")
            _write(None, dumps({"task": doc["task"], "replay": verdict, "record": record}))
            return 1 if record["status"] != "holds" else 0
    except WorkspaceError as exc:
        sys.stderr.write(f"{getattr(args, 'workspace', None) or args.counterexample}:{exc.line}:{exc.column}: error: {exc.message}\n")
        return 2
    except (OSError, UnicodeDecodeError, json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
