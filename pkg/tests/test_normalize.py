import random

import pytest

from helpers import DerivationGen
from tenseproof.derivation import assume, node
from tenseproof.kernel import check, open_assumptions
from tenseproof.normalize import (
    NonTermination, RedexStale, canonical_form, find_redexes, is_normal,
    normalize, reduce_step, restrict,
)
from tenseproof.parser import parse_lwff as pl, parse_rwff as pr
from tenseproof.rules import KL
from tenseproof.syntax import Empty, core_eq

E = Empty()


def g_detour():
    lt1 = assume(pr("x < y"), 1)
    gp = assume(pl("x : G p"), 2)
    ge_in = node("g_e", pl("y : p"), gp, lt1)
    gi = node("g_i", pl("x : G p"), ge_in, discharges={1}, fresh="y")
    return node("g_e", pl("z : p"), gi, assume(pr("x < z")))


# ---------------------------------------------------------------------------
# restrict

def test_restrict_raa_implication_case():
    leaf1 = assume(pl("x : (a -> b) -> false"), 1)
    body = node("imp_e", pl("x : false"), leaf1, assume(pl("x : a -> b"), 9))
    raa = node("raa_bot", pl("x : a -> b"), body, discharges={1})
    out = restrict(raa)
    assert check(out, KL).ok
    assert out.conclusion == raa.conclusion
    # the rebuilt tree ends with an implication introduction over a
    # restricted refutation, per the standard transformation
    assert out.rule == "imp_i"
    assert out.premises[0].rule == "raa_bot"
    for _, n in out.walk():
        if n.rule in ("raa_bot", "raa_empty"):
            from tenseproof.syntax import is_atomic
            assert is_atomic(n.conclusion)
    assert open_assumptions(out) == open_assumptions(raa)


def test_restrict_is_fixpoint_on_restricted_trees():
    d = g_detour()
    assert restrict(d) == d


def test_restrict_mon_on_falsum():
    monbot = node("mon", pl("y : false"), assume(pl("x : false")),
                  assume(pr("x = y")))
    out = restrict(monbot)
    assert out.rule == "raa_bot"
    assert not out.discharges
    assert out.conclusion == pl("y : false")
    assert check(out, KL).ok


def test_restrict_raa_empty_never_concludes_empty():
    leaf = assume(pr("empty => empty"), 1)
    body = node("rimp_e", E, leaf, assume(E, 2))
    raa = node("raa_empty", E, body, discharges={1})
    assert check(raa, KL).ok
    out = restrict(raa)
    assert check(out, KL).ok
    for _, n in out.walk():
        if n.rule == "raa_empty":
            assert not core_eq(n.conclusion, E)
    assert core_eq(out.conclusion, E)


def test_restrict_raa_universal_case():
    leaf = assume(pr("(forall v. !(v < v)) => empty"), 1)
    body = node("rimp_e", E, leaf, assume(pr("forall v. !(v < v)"), 2))
    raa = node("raa_empty", pr("forall v. !(v < v)"), body, discharges={1})
    assert check(raa, KL).ok
    out = restrict(raa)
    assert check(out, KL).ok
    assert out.rule == "all_i"
    assert core_eq(out.conclusion, raa.conclusion)


def test_restrict_nonatomic_mon_goes_positional():
    monG = node("mon", pl("y : G p"), assume(pl("x : G p")), assume(pr("x = y")))
    out = restrict(monG)
    rep = check(out, KL)
    assert rep.ok
    assert core_eq(out.conclusion, pl("y : G p"))
    for _, n in out.walk():
        if n.rule == "mon":
            from tenseproof.normalize import _mon_class
            kind, _ = _mon_class(n)
            assert kind == "ok"
    opens = {c for c in open_assumptions(out)}
    assert opens == {pl("x : G p"), pr("x = y")}


def test_restrict_multi_position_mon_splits():
    d = node("mon", pr("y < y"), assume(pr("x < x")), assume(pr("x = y")))
    out = restrict(d)
    assert check(out, KL).ok
    mons = [n for _, n in out.walk() if n.rule == "mon"]
    assert len(mons) == 2
    assert {n.position for n in mons} == {1, 2}


# ---------------------------------------------------------------------------
# find_redexes / reduce_step

def test_detour_found_and_reduced():
    d = g_detour()
    rs = find_redexes(d)
    assert [r.kind for r in rs] == ["MaximalFormula"]
    assert rs[0].detail == "g_i/g_e"
    out = reduce_step(d, rs[0])
    assert check(out, KL).ok
    assert out.conclusion == d.conclusion
    # the inner subderivation is grafted with the new label substituted
    assert out == node("g_e", pl("z : p"), assume(pl("x : G p"), 2),
                       assume(pr("x < z")))


def test_normalized_corpus_tree_has_no_redexes():
    from tenseproof.corpus import corpus_entries
    entry = corpus_entries("g3")[0]
    nf = normalize(entry.derivation)
    assert find_redexes(nf) == []


def test_falsum_chain_redexes():
    # a falsum conclusion feeding another falsum rule, in all four shapes
    raa_raa = node("raa_bot", pl("z : p"),
                   node("raa_bot", pl("y : false"), assume(pl("x : false"))))
    assert [r.detail for r in find_redexes(raa_raa)] == ["raa_bot;raa_bot"]

    raa_uf1 = node("uf1", E, node("raa_bot", pl("y : false"),
                                  assume(pl("x : false"))))
    assert [r.detail for r in find_redexes(raa_uf1)] == ["raa_bot;uf1"]

    uf1_uf2 = node("uf2", pl("y : false"),
                   node("uf1", E, assume(pl("x : false"))))
    assert [r.detail for r in find_redexes(uf1_uf2)] == ["uf1;uf2"]

    uf2_uf1 = node("uf1", E, node("uf2", pl("x : false"), assume(E, 5)))
    assert [r.detail for r in find_redexes(uf2_uf1)] == ["uf2;uf1"]


def test_reduce_raa_then_uf1():
    d = node("uf1", E, node("raa_bot", pl("y : false"), assume(pl("x : false"))))
    out = reduce_step(d, find_redexes(d)[0])
    assert out == node("uf1", E, assume(pl("x : false")))


def test_reduce_uf1_then_uf2_becomes_transport():
    d = node("uf2", pl("y : false"), node("uf1", E, assume(pl("x : false"))))
    out = reduce_step(d, find_redexes(d)[0])
    assert out == node("raa_bot", pl("y : false"), assume(pl("x : false")))


def test_reduce_uf2_then_uf1_deletes_both():
    d = node("uf1", E, node("uf2", pl("x : false"), assume(E, 5)))
    out = reduce_step(d, find_redexes(d)[0])
    assert out == assume(E, 5)


def test_mon_composition():
    base = assume(pl("x : p"))
    m1 = node("mon", pl("y : p"), base, assume(pr("x = y")), position=1)
    m2 = node("mon", pl("z : p"), m1, assume(pr("y = z")), position=1)
    rs = find_redexes(m2)
    assert [r.kind for r in rs] == ["RedundantMon"]
    out = reduce_step(m2, rs[0])
    assert check(out, KL).ok
    assert out.conclusion == pl("z : p")
    # the composed equality is derived by a position-2 mon
    assert out.rule == "mon" and out.premises[0] == base
    inner = out.premises[1]
    assert inner.rule == "mon" and inner.position == 2
    assert core_eq(inner.conclusion, pr("x = z"))


def test_mon_ordering_permutation():
    base = assume(pr("x < y"))
    m1 = node("mon", pr("x < u"), base, assume(pr("y = u")), position=2)
    m2 = node("mon", pr("z < u"), m1, assume(pr("x = z")), position=1)
    rs = find_redexes(m2)
    assert [r.kind for r in rs] == ["MonDisorder"]
    out = reduce_step(m2, rs[0])
    assert check(out, KL).ok
    assert out.conclusion == m2.conclusion
    # after the swap the position-1 application happens first
    assert out.position == 2 and out.premises[0].position == 1


def test_sorted_same_position_pair_not_disordered():
    base = assume(pr("x < y"))
    m1 = node("mon", pr("z < y"), base, assume(pr("x = z")), position=1)
    m2 = node("mon", pr("z < u"), m1, assume(pr("y = u")), position=2)
    assert find_redexes(m2) == []


def test_stale_redex_rejected():
    d = g_detour()
    r = find_redexes(d)[0]
    out = reduce_step(d, r)
    with pytest.raises(RedexStale):
        reduce_step(out, r)


# ---------------------------------------------------------------------------
# normalize

def test_normalize_leaf_is_identity():
    leaf = assume(pl("x : p"))
    assert normalize(leaf) == leaf


def test_normalize_vacuous_imp_detour():
    # an introduction discharging nothing, immediately eliminated: the
    # minor premise disappears and the inner refutation remains
    inner = node("raa_bot", pl("x : p"), assume(pl("y : false")))
    intro = node("imp_i", pl("x : q -> p"), inner, discharges={1})
    detour = node("imp_e", pl("x : p"), intro, assume(pl("x : q")))
    out = normalize(detour)
    assert out == inner
    assert out.node_count() == 2


def test_normalize_corpus_density_entry():
    from tenseproof.corpus import corpus_entries
    entry = corpus_entries("rdens")[0]
    nf = normalize(entry.derivation)
    assert is_normal(nf).normal
    assert check(nf, entry.profile).ok
    assert nf.conclusion == entry.derivation.conclusion


def test_normalize_idempotent():
    rng = random.Random(23)
    gen = DerivationGen(rng)
    for _ in range(40):
        d = gen.derivation()
        nf = normalize(d)
        assert canonical_form(normalize(nf)) == canonical_form(nf)


def test_normalize_preserves_conclusion_and_assumptions():
    rng = random.Random(17)
    gen = DerivationGen(rng)
    for _ in range(60):
        d = gen.derivation()
        nf = normalize(d)
        assert nf.conclusion == d.conclusion
        before = {c for c in open_assumptions(d)}
        after = {c for c in open_assumptions(nf)}
        assert all(any(core_eq(a, b) for b in before) for a in after)


def test_restrict_random_nonatomic_mons():
    # positional transport across arbitrary relational shapes, including
    # quantifiers and the immediate-precedence sugar
    from helpers import random_rwff
    from tenseproof.syntax import Eq, expand, labels_of, substitute_label
    rng = random.Random(42)
    tested = 0
    for _ in range(120):
        rho = random_rwff(rng, 3)
        if "x" not in labels_of(rho):
            continue
        target = substitute_label(expand(rho), "y", "x")
        m = node("mon", target, assume(rho), assume(pr("x = y")))
        if not check(m, KL).ok:
            continue
        out = restrict(m)
        assert check(out, KL).ok
        assert core_eq(out.conclusion, target)
        before = set(open_assumptions(m))
        after = set(open_assumptions(out))
        assert all(any(core_eq(a, b) for b in before) for a in after)
        nf = normalize(m)
        assert is_normal(nf).normal and check(nf, KL).ok
        tested += 1
    assert tested >= 40


def test_step_bound_guard():
    with pytest.raises(NonTermination):
        normalize(g_detour(), bound=0)


def test_step_bound_env_override(monkeypatch):
    monkeypatch.setenv("TENSEPROOF_STEP_BOUND", "123")
    from tenseproof.normalize import step_bound
    assert step_bound() == 123


def test_trace_records():
    trace = []
    normalize(g_detour(), trace=trace)
    assert len(trace) == 1
    record = trace[0]
    assert record["kind"] == "MaximalFormula"
    assert record["step"] == 1
    assert "site" in record and "nodes" in record


def test_is_normal_diagnosis():
    d = g_detour()
    report = is_normal(d)
    assert not report.normal
    assert report.redexes[0].kind == "MaximalFormula"
    assert is_normal(normalize(d)).normal


def test_next_step_detour_reduces():
    from tenseproof.rules import parse_profile
    mtl = parse_profile("mtl")
    inner = node("x_e", pl("y : p"), assume(pl("x : X p"), 2),
                 assume(pr("x <. y"), 1))
    intro = node("x_i", pl("x : X p"), inner, discharges={1}, fresh="y")
    detour = node("x_e", pl("z : p"), intro, assume(pr("x <. z")))
    assert check(detour, mtl).ok
    nf = normalize(detour)
    assert is_normal(nf).normal
    assert check(nf, mtl).ok
    assert nf == node("x_e", pl("z : p"), assume(pl("x : X p"), 2),
                      assume(pr("x <. z")))


def test_nested_detours_all_eliminated():
    # an inner detour sits above an outer one of equal grade; the selection
    # strategy must pick the inner one first and still clear both
    inner = node("imp_e", pl("x : p"),
                 node("imp_i", pl("x : p -> p"), assume(pl("x : p"), 1),
                      discharges={1}),
                 assume(pl("x : p")))
    outer = node("imp_e", pl("x : p"),
                 node("imp_i", pl("x : q -> p"), inner, discharges={2}),
                 assume(pl("x : q")))
    report = check(outer, KL)
    assert report.ok, [str(v) for v in report.violations]
    rs = find_redexes(outer)
    assert len(rs) == 2
    nf = normalize(outer)
    assert is_normal(nf).normal
    assert check(nf, KL).ok
    assert nf == assume(pl("x : p"))
