"""End-to-end acceptance gate.

One test per advertised guarantee, each ending in a printed pass line, so
`pytest -v` reads as a checklist.  Timing budgets are asserted with
`time.perf_counter` around the operation under test only.
"""

import itertools
import random
import time

from causact.formula import parse_formula
from causact.model import parse_model, parse_context
from causact.hp import is_actual_cause_hp
from causact.abstract import (
    CausalSetting,
    CfSetting,
    conj_language,
    gen_language,
    is_actual_cause_abstract,
)
from causact.explanation import is_explanation_hp
from causact.correspondence import build_counterpart
from causact.harness import run_differential
from causact.corpus import (
    CHAIN_COPY,
    ROCK_THROWING,
    THREE_CONTEXT,
    backtracking_structure,
    bomb_model,
    bomb_structures,
    chain3_model,
)


def _done(n, detail):
    print(f"criterion {n}: PASS ({detail})")


def test_criterion_01_rock_throwing_witness():
    start = time.perf_counter()
    m = parse_model(ROCK_THROWING)
    u = {"U": "u11"}
    bs1 = parse_formula("BS=1", m.sig)
    suzy = is_actual_cause_hp(m, u, parse_formula("ST=1", m.sig), bs1)
    billy = is_actual_cause_hp(m, u, parse_formula("BT=1", m.sig), bs1)
    elapsed = time.perf_counter() - start
    assert suzy.is_cause
    assert suzy.witnesses[0].w == ("BH",)
    assert suzy.witnesses[0].wstar == ("0",)
    assert not billy.is_cause
    assert elapsed < 1.0
    _done(1, f"witness W={{BH: 0}}, {elapsed:.3f}s")


def test_criterion_02_conjunctive_language_differential():
    start = time.perf_counter()
    report = run_differential("theorem1", trials=500, seed=2024)
    elapsed = time.perf_counter() - start
    assert report.ok, report.to_json()
    assert report.agreements == 500
    assert elapsed < 60.0
    negated = run_differential("theorem1", trials=500, seed=2024, negated=True)
    assert negated.ok, negated.to_json()
    _done(2, f"500 + 500 negated trials, 0 disagreements, {elapsed:.1f}s plain")


def test_criterion_03_structure_language_differential():
    start = time.perf_counter()
    report = run_differential("theorem2", trials=200, seed=2024)
    elapsed = time.perf_counter() - start
    assert report.ok, report.to_json()
    assert report.agreements == 200
    assert elapsed < 300.0
    _done(3, f"200 trials, 0 disagreements, {elapsed:.1f}s")


def test_criterion_04_formula_transfer_differential():
    start = time.perf_counter()
    report = run_differential("prop3", trials=200, seed=2024)
    elapsed = time.perf_counter() - start
    assert report.ok, report.to_json()
    assert report.agreements == 200
    assert elapsed < 300.0
    _done(4, f"200 models x 50 formulas, 0 disagreements, {elapsed:.1f}s")


def test_criterion_05_divergent_counterfactual_conjunction():
    m = parse_model(CHAIN_COPY)
    u = {"U": "0"}
    phi = parse_formula("(X!=0 ~> Y=1) & (X!=0 ~> Y=2)", m.sig)
    assert m.evaluate(u, phi)
    # no single closeness order can satisfy both conjuncts: all closest
    # nonzero-X states would have to make Y both 1 and 2 (the general
    # conjunction-closure property is exercised in the structure test
    # suite; here the built counterpart is checked exhaustively)
    m2, _ = build_counterpart(m)
    assert all(not m2.satisfies_at(s, phi) for s in m2.states)
    _done(5, "true under interventions, unsatisfiable in every structure state")


def test_criterion_06_backtracking_with_and_without_pin():
    m2, actual = backtracking_structure()
    setting = CfSetting(m2, actual)
    bt1 = parse_formula("BT=1", m2.sig)
    bs1 = parse_formula("BS=1", m2.sig)
    unpinned = is_actual_cause_abstract(setting, bt1, bs1, conj_language())
    assert unpinned.is_cause
    pinned_lang = conj_language(pins=[parse_formula("U=u11", m2.sig)])
    pinned = is_actual_cause_abstract(setting, bt1, bs1, pinned_lang)
    assert not pinned.is_cause
    _done(6, "cause without pin, not a cause with U pinned")


def test_criterion_07_explanation_verdicts():
    start = time.perf_counter()
    m = parse_model(THREE_CONTEXT)
    both = parse_formula("ST=1 & BT=1", m.sig)
    bs1 = parse_formula("BS=1", m.sig)

    def K(*names):
        return [parse_context(f"U={n}", m.sig) for n in names]

    k1 = is_explanation_hp(m, K("u111", "u112", "u101"), both, bs1)
    assert k1.is_explanation and k1.nontrivial
    k2 = is_explanation_hp(m, K("u111", "u112"), both, bs1)
    assert k2.is_explanation and not k2.nontrivial and not k2.ex4
    K3 = K("u003", "u103", "u013", "u113")
    assert is_explanation_hp(m, K3, parse_formula("ST=1", m.sig), bs1).is_explanation
    assert is_explanation_hp(m, K3, parse_formula("BT=1", m.sig), bs1).is_explanation
    k3both = is_explanation_hp(m, K3, both, bs1)
    assert not k3both.is_explanation and not k3both.ex2
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _done(7, f"K1 nontrivial, K2 trivial, K3 minimality, {elapsed:.1f}s")


def test_criterion_08_explanation_differentials():
    start = time.perf_counter()
    r4 = run_differential("theorem4", trials=100, seed=2024)
    r5 = run_differential("theorem5", trials=100, seed=2024)
    elapsed = time.perf_counter() - start
    assert r4.ok, r4.to_json()
    assert r5.ok, r5.to_json()
    assert elapsed < 600.0
    _done(8, f"100 + 100 trials, 0 disagreements, {elapsed:.1f}s")


def test_criterion_09_disjunctive_language_degeneracy():
    m = chain3_model()
    setting = CausalSetting(m, {"U": "1"})
    effect = parse_formula("C=1", m.sig)
    lang = gen_language(1)  # clauses may contain C=0, i.e. the negated effect
    actual = m.solve({"U": "1"})
    events = [f"{x}={actual[x]}" for x in m.sig.endo_names]
    candidates = [
        parse_formula(" & ".join(combo), m.sig)
        for size in range(1, len(events) + 1)
        for combo in itertools.combinations(events, size)
    ]
    assert candidates
    for cand in candidates:
        assert is_actual_cause_abstract(setting, cand, effect, lang).ac2
    _done(9, f"all {len(candidates)} true candidates pass the counterfactual condition")


def test_criterion_10_bomb_divergence():
    m = bomb_model()
    u = {"Ur": "1", "Uc": "c3"}
    run1 = parse_formula("Run=1", m.sig)
    boom = parse_formula("Explode=1", m.sig)
    assert is_actual_cause_hp(m, u, run1, boom).is_cause
    ignorant, knowing = bomb_structures()
    assert not is_actual_cause_abstract(CfSetting(ignorant, "s"), run1, boom, conj_language()).is_cause
    assert is_actual_cause_abstract(CfSetting(knowing, "s"), run1, boom, conj_language()).is_cause
    _done(10, "interventionist yes, ignorant-Bob no, knowing-Bob yes")


def test_criterion_11_performance_budget():
    rng = random.Random(8)
    names = [f"V{i}" for i in range(1, 9)]
    lines = ["model perf", "exo U1 : { 0, 1 }", "exo U2 : { 0, 1 }"]
    lines += [f"var {v} : {{ 0, 1 }}" for v in names]
    for i, v in enumerate(names):
        pool = ["U1", "U2"] + names[:i]
        parents = rng.sample(pool, min(len(pool), 3))
        rows = [
            f"{' & '.join(f'{p}={c}' for p, c in zip(parents, combo))} : {rng.choice('01')}"
            for combo in itertools.product("01", repeat=len(parents))
        ]
        lines.append(f"eq {v} = case {{ {' ; '.join(rows)} ; default: 0 }}")
    m = parse_model("\n".join(lines))
    u = {"U1": "1", "U2": "0"}
    actual = m.solve(u)
    cause = parse_formula(f"V3={actual['V3']} & V5={actual['V5']}", m.sig)
    effect = parse_formula(f"V8={actual['V8']}", m.sig)
    start = time.perf_counter()
    verdict = is_actual_cause_hp(m, u, cause, effect)
    elapsed = time.perf_counter() - start
    assert isinstance(verdict.is_cause, bool)
    assert elapsed < 5.0
    _done(11, f"8 binary endogenous variables, query in {elapsed:.2f}s")
