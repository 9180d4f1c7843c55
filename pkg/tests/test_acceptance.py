"""The ten acceptance criteria, each printing one PASS/FAIL line.

Checks are exhaustive on the stated fragments and exact.  Criterion 2 asks
for a failure of unique choice in the chain power doctrine; unique choice in
fact holds there, so that clause is kept as a strict expected failure while
the rest of the criterion is checked normally.
"""

import json
import time
from pathlib import Path

import pytest

from eqcomp import cli, doctrine as D, lattice, oracle as O
from eqcomp import constructions as K
from eqcomp.completions import (
    collapse_of_intensional,
    comprehension_completion,
    eqc,
    quotients_of_collapse,
)
from eqcomp.corpus import (
    FuzCategory,
    PowerDoctrine,
    SeparatedHSets,
    UMCategory,
    fuz_to_comprehension,
    separated_to_eqc,
    um_to_eqc,
)
from eqcomp.kernel import Fragment

from verdicts import record

ROOT = Path(__file__).resolve().parent.parent
P2 = PowerDoctrine(lattice.boolean())
PH = PowerDoctrine(lattice.h3())
UPTO2 = Fragment(cap=2)
UPTO3 = Fragment(cap=3)


def _statuses(reports):
    return {k: r.status for k, r in reports.items()}


def test_criterion_1_capability_matrix():
    start = time.perf_counter()
    props = [
        "primary",
        "elementary",
        "existential",
        "first_order",
        "tripos",
        "comprehension_strong",
        "comprehension_full",
        "RUC",
        "RC",
    ]
    reports = {p: D.verify(P2, p, UPTO3) for p in props}
    elapsed = time.perf_counter() - start
    ok = all(r.holds for r in reports.values()) and elapsed < 10
    record(1, ok, "Boolean power doctrine, sets of size <= 3: " + ", ".join(props), elapsed)
    assert ok, _statuses(reports)


def _criterion_2_parts():
    H = PH.H
    h, top, bot = H.index("h"), H.top, H.index("0")
    holds = {p: D.verify(PH, p, UPTO2) for p in ["elementary", "existential", "tripos", "comprehension_strong"]}
    full = D.verify(PH, "comprehension_full", UPTO2)
    # the pair (1,h) and (1,0): same comprehension, not comparable the right way
    a, b = (top, h), (top, bot)
    pair_witness = PH.comprehension(2, a) == PH.comprehension(2, b) and not PH.fiber(2).le(a, b)
    boolean = D.verify(PH, "boolean", UPTO2)
    cex = boolean.counterexample or {}
    excluded_middle = boolean.fails and cex.get("alpha") == (h,) and cex.get("alpha_or_not_alpha") == (h,)
    excluded_middle = excluded_middle and H.join(H.neg(h), h) == h
    return holds, full, pair_witness, excluded_middle


def test_criterion_2_chain_doctrine():
    start = time.perf_counter()
    holds, full, pair_witness, excluded_middle = _criterion_2_parts()
    elapsed = time.perf_counter() - start
    ok = all(r.holds for r in holds.values()) and full.fails and pair_witness and excluded_middle and elapsed < 10
    detail = "tripos, strong but not full comprehension via (1,h) vs (1,0), not boolean via h or not h = h"
    record("2 (without unique choice)", ok, detail, elapsed)
    assert ok


@pytest.mark.xfail(strict=True, reason="unique choice holds in the chain power doctrine")
def test_criterion_2_unique_choice_fails():
    start = time.perf_counter()
    ruc = D.verify(PH, "RUC", UPTO2)
    elapsed = time.perf_counter() - start
    ok = ruc.fails and ruc.counterexample is not None
    record(2, ok, f"unique choice expected to fail, got {ruc.status} on {ruc.checked} relations (strict xfail)", elapsed)
    assert ok


def test_criterion_3_quotients():
    start = time.perf_counter()
    reports, mismatched = {}, []
    for name, P in (("two", P2), ("chain", PH)):
        Q = eqc(P)
        for kind in ("effective", "stable", "descent"):
            reports[f"{name}:{kind}"] = D.verify(Q, f"quotients_{kind}", UPTO2)
        # second route: descent decided directly and compared with surj-P
        for a, rho in D._quotient_instances(Q, UPTO2):
            q = Q.quotient(a, rho)
            if D.is_effective_descent(Q, q, UPTO2) is not D.is_surjP(Q, q):
                mismatched.append((name, a, rho))
    elapsed = time.perf_counter() - start
    ok = all(r.holds for r in reports.values()) and not mismatched and elapsed < 60
    n = sum(r.checked for r in reports.values())
    record(3, ok, f"quotients effective, stable, descent iff surjective ({n} instances)", elapsed)
    assert ok, _statuses(reports)


def test_criterion_4_fuzzy_sets():
    start = time.perf_counter()
    H = PH.H
    Cc = comprehension_completion(PH)
    reports = {
        "separated_vs_quotients": O.check_equivalence(separated_to_eqc(SeparatedHSets(H), eqc(Cc)), UPTO2),
        "fuz_vs_comprehension": O.check_equivalence(fuz_to_comprehension(FuzCategory(H), Cc), UPTO2),
        "um_vs_quotients": O.check_equivalence(um_to_eqc(UMCategory(H), eqc(PH)), UPTO2),
    }
    elapsed = time.perf_counter() - start
    ok = all(r["equivalence"].holds for r in reports.values()) and elapsed < 60
    record(4, ok, "H-valued sets equivalent to the completed chain doctrine on carriers <= 2", elapsed)
    assert ok, {k: _statuses(v) for k, v in reports.items()}


def test_criterion_5_quasitopos():
    start = time.perf_counter()
    two = K.check_quasitopos(eqc(P2), UPTO2)
    chain = K.check_quasitopos(eqc(comprehension_completion(PH)), UPTO2, arrow_limit=6)
    elapsed = time.perf_counter() - start
    ok = two["quasitopos"].holds and chain["quasitopos"].holds and elapsed < 300
    n = two["quasitopos"].checked + chain["quasitopos"].checked
    record(5, ok, f"limits, coproducts, slice exponentials, classifier ({n} instances)", elapsed)
    assert ok, (_statuses(two), _statuses(chain))


def test_criterion_6_closure_agreement():
    start = time.perf_counter()
    counts = {}
    for name, P in (("two", P2), ("chain", PH)):
        rels = list(P.fiber(4).elements())
        diffs = [r for r in rels if K.equiv_closure(P, 2, r, "fixpoint") != K.equiv_closure(P, 2, r, "tripos")]
        counts[name] = (len(rels), len(diffs))
    elapsed = time.perf_counter() - start
    ok = counts == {"two": (16, 0), "chain": (81, 0)} and elapsed < 60
    record(6, ok, f"fixpoint and formula closures agree on {counts['two'][0]} + {counts['chain'][0]} relations", elapsed)
    assert ok, counts


def test_criterion_7_projective_core():
    start = time.perf_counter()
    core = K.projective_core(eqc(P2), UPTO2)
    elapsed = time.perf_counter() - start
    ok = core.verdict.holds and elapsed < 60
    record(7, ok, f"{len(core.candidates)} diagonal objects are enough projectives, closed under products, re-completion equivalent", elapsed)
    assert ok, _statuses(core.reports)


def test_criterion_8_decomposition():
    start = time.perf_counter()
    reports = {}
    for name, P in (("two", P2), ("chain", PH)):
        Q = eqc(P)
        reports[f"{name}:collapse_of_intensional"] = O.check_equivalence(collapse_of_intensional(P, Q), UPTO2)
        reports[f"{name}:quotients_of_collapse"] = O.check_equivalence(quotients_of_collapse(P, Q), UPTO2)
    elapsed = time.perf_counter() - start
    ok = all(r["equivalence"].holds for r in reports.values()) and elapsed < 60
    record(8, ok, "collapse of intensional completion and completion of collapse both equivalent", elapsed)
    assert ok, {k: _statuses(v) for k, v in reports.items()}


def test_criterion_9_coarse_reflection():
    start = time.perf_counter()
    Q = eqc(P2)
    reports = dict(K.check_coarse_reflection(Q, UPTO2))
    reports.update(K.check_coarse_comparisons(Q, UPTO2))
    elapsed = time.perf_counter() - start
    ok = all(r.holds for r in reports.values()) and elapsed < 60
    record(9, ok, "unit monic and epic, idempotent, coarse = functional = finite sets", elapsed)
    assert ok, _statuses(reports)


def test_criterion_10_mutation_sensitivity():
    start = time.perf_counter()
    ws = cli.parse_workspace((ROOT / "workspaces" / "mutation.ws").read_text())
    report = cli.run(ws)
    docs = cli.counterexample_files(ws, report)
    kinds = {t.check for t in ws.tasks}
    replayed = all(cli.replay(json.loads(cli.dumps(doc)))[0] for doc in docs.values())
    elapsed = time.perf_counter() - start
    detected = sum(t["status"] == "fails" for t in report["tasks"])
    ok = (
        detected == len(report["tasks"])
        and kinds == {"mutant_pairing", "mutant_lambda", "mutant_coproduct", "mutant_closure"}
        and len(docs) == detected
        and replayed
        and elapsed < 60
    )
    record(10, ok, f"{detected}/{len(report['tasks'])} seeded wrong witnesses rejected, all counterexamples replay", elapsed)
    assert ok
