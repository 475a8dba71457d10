import pytest

from causact.formula import FormulaError, parse_formula
from causact.hp import HpWitness, check_witness, is_actual_cause_hp
from causact.model import parse_model
from causact.corpus import BOMB, ROCK_THROWING


@pytest.fixture(scope="module")
def rt():
    return parse_model(ROCK_THROWING)


U11 = {"U": "u11"}


def rt_check(rt, cause, effect="BS=1", u=U11, **kw):
    return is_actual_cause_hp(rt, u, parse_formula(cause, rt.sig), parse_formula(effect, rt.sig), **kw)


class TestRockThrowing:
    def test_suzy_causes_shattering(self, rt):
        v = rt_check(rt, "ST=1")
        assert v.is_cause and v.ac1 and v.ac2 and v.ac3

    def test_first_witness_holds_billys_miss_fixed(self, rt):
        v = rt_check(rt, "ST=1")
        assert v.witnesses[0] == HpWitness(w=("BH",), wstar=("0",), xprime=("0",))

    def test_billy_not_a_cause(self, rt):
        v = rt_check(rt, "BT=1")
        assert not v.is_cause
        assert v.ac1 and not v.ac2

    def test_conjunction_fails_minimality(self, rt):
        v = rt_check(rt, "ST=1 & BT=1")
        assert not v.is_cause and v.ac2 and not v.ac3
        assert v.ac3_violator == (("ST", "1"),)

    def test_hit_causes_shattering(self, rt):
        assert rt_check(rt, "SH=1").is_cause

    def test_false_cause_fails_ac1(self, rt):
        v = rt_check(rt, "ST=0")
        assert not v.ac1 and not v.is_cause

    def test_billy_only_context_is_but_for(self, rt):
        v = rt_check(rt, "BT=1", u={"U": "u01"})
        assert v.is_cause
        assert v.witnesses[0].w == ()  # empty witness set: plain but-for

    def test_first_only_stops_early(self, rt):
        v = rt_check(rt, "ST=1", first_only=True)
        assert len(v.witnesses) == 1

    def test_all_witnesses_recheck(self, rt):
        v = rt_check(rt, "ST=1")
        cause = parse_formula("ST=1", rt.sig)
        effect = parse_formula("BS=1", rt.sig)
        assert len(v.witnesses) >= 2
        for w in v.witnesses:
            assert check_witness(rt, U11, cause, effect, w)

    def test_tampered_witness_rejected(self, rt):
        bad = HpWitness(w=("BH",), wstar=("1",), xprime=("0",))  # not the actual value
        cause = parse_formula("ST=1", rt.sig)
        effect = parse_formula("BS=1", rt.sig)
        assert not check_witness(rt, U11, cause, effect, bad)


class TestSymmetricOverdetermination:
    """Two switches, a lamp that lights if either is on: neither switch
    alone is a cause under the modified definition, the pair is."""

    MODEL = (
        "model lamp\nexo U : { 0 }\nvar A : { 0, 1 }\nvar B : { 0, 1 }\nvar L : { 0, 1 }\n"
        "eq A = case { default: 1 }\n"
        "eq B = case { default: 1 }\n"
        "eq L = case { A=1 | B=1 : 1 ; default: 0 }\n"
    )

    def test_single_switch_not_a_cause(self):
        m = parse_model(self.MODEL)
        u = {"U": "0"}
        assert not is_actual_cause_hp(m, u, parse_formula("A=1", m.sig), parse_formula("L=1", m.sig)).is_cause

    def test_pair_is_a_cause(self):
        m = parse_model(self.MODEL)
        u = {"U": "0"}
        v = is_actual_cause_hp(m, u, parse_formula("A=1 & B=1", m.sig), parse_formula("L=1", m.sig))
        assert v.is_cause
        assert v.witnesses[0].xprime == ("0", "0")


class TestBomb:
    def test_running_away_is_a_but_for_cause(self):
        m = parse_model(BOMB)
        u = {"Ur": "1", "Uc": "c3"}
        v = is_actual_cause_hp(m, u, parse_formula("Run=1", m.sig), parse_formula("Explode=1", m.sig))
        assert v.is_cause
        assert v.witnesses[0].w == ()


class TestValidation:
    def test_disjunctive_cause_rejected(self, rt):
        with pytest.raises(FormulaError):
            rt_check(rt, "ST=1 | BT=1")

    def test_empty_cause_rejected(self, rt):
        with pytest.raises(FormulaError):
            rt_check(rt, "true")

    def test_counterfactual_effect_rejected(self, rt):
        with pytest.raises(FormulaError):
            rt_check(rt, "ST=1", effect="(ST=0) ~> (BS=0)")

    def test_negated_effect_allowed(self, rt):
        assert rt_check(rt, "ST=1", effect="!BS=0").is_cause
