"""Normalization: restriction of falsum/monotonicity rules, detour
elimination, ordering and composition of monotonicity chains, and removal of
redundant falsum chains.

The engine is a single redex scanner plus one-step reducers.  ``restrict``
runs only the restriction redexes; ``normalize`` runs everything to a
fixpoint under a deterministic strategy: restriction sites first, then the
maximal formula of highest grade having no equally-high maximal formula
above it, then chain permutations, compositions and falsum collapses.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, replace

from .derivation import (
    Derivation, MarkerGen, all_labels, all_markers, assume, graft, node,
    refresh_internal_markers, replace_at, substitute_label_deriv,
)
from .kernel import (
    _expand_entity, _xf, match_instantiation, mon_positions, replace_position,
)
from .rules import AXIOMS, DETOUR_PAIRS, FALSUM_RULES
from .syntax import (
    Atom, Empty, Eq, Falsum, Forall, G, H, Implies, LabelGen, Less, Lwff,
    Prec, RImplies, X, canon, core_eq, expand, grade, substitute_label,
)

F_ = Falsum()
E_ = Empty()

DEFAULT_STEP_BOUND = 10 ** 6


class RedexStale(Exception):
    """The redex no longer matches the tree it was found on."""


class NonTermination(RuntimeError):
    def __init__(self, steps: int):
        super().__init__(
            f"normalization exceeded the step bound after {steps} steps; "
            "this signals an implementation bug, not expected behavior")
        self.steps = steps


@dataclass(frozen=True)
class Redex:
    kind: str    # MaximalFormula | MonDisorder | RedundantFalsum |
                 # RedundantMon | UnrestrictedRAA | UnrestrictedMon
    path: tuple
    detail: str = ""


def step_bound() -> int:
    env = os.environ.get("TENSEPROOF_STEP_BOUND")
    return int(env) if env else DEFAULT_STEP_BOUND


# ---------------------------------------------------------------------------
# Mon classification

def _mon_class(n: Derivation):
    """Classify a mon node: ('ok', position) for a clean single-position
    application on an atomic major premise, else the restriction case."""
    p0 = n.premises[0].conclusion
    eq = expand(n.premises[1].conclusion)
    core0 = _expand_entity(p0)
    if isinstance(core0, Lwff) and isinstance(core0.formula, Falsum):
        return ("bot", None)
    if core_eq(p0, n.conclusion):
        return ("noop", None)
    atomic = (isinstance(core0, Lwff) and isinstance(core0.formula, (Atom, Falsum))) \
        or isinstance(core0, (Less, Eq, Empty))
    if not atomic:
        return ("nonatomic", None)
    positions = mon_positions(p0, eq, n.conclusion)
    if positions:
        return ("ok", positions[0])
    return ("multi", None)


def _mon_position(n: Derivation):
    kind, pos = _mon_class(n)
    return pos if kind == "ok" else None


# ---------------------------------------------------------------------------
# Redex search

def find_redexes(d: Derivation) -> list:
    out = []
    for path, n in d.walk():
        if not n.premises:
            continue
        p0 = n.premises[0]

        if DETOUR_PAIRS.get(n.rule) == p0.rule:
            out.append(Redex("MaximalFormula", path, f"{p0.rule}/{n.rule}"))

        if n.rule == "raa_bot" and not isinstance(_xf(n.conclusion), (Atom, Falsum)):
            out.append(Redex("UnrestrictedRAA", path, "raa_bot"))
        if n.rule == "raa_empty":
            core = expand(n.conclusion)
            if isinstance(core, Empty) or not isinstance(core, (Less, Eq)):
                out.append(Redex("UnrestrictedRAA", path, "raa_empty"))

        if n.rule == "mon":
            kind, _ = _mon_class(n)
            if kind != "ok":
                out.append(Redex("UnrestrictedMon", path, kind))
            elif p0.rule == "mon":
                pu = _mon_position(p0)
                pl = _mon_position(n)
                if pu is not None and pl is not None:
                    if pu == pl:
                        out.append(Redex("RedundantMon", path))
                    elif pu == 2 and pl == 1:
                        out.append(Redex("MonDisorder", path))

        if n.rule in FALSUM_RULES and p0.rule in FALSUM_RULES:
            pair = f"{p0.rule};{n.rule}"
            if pair in ("raa_bot;raa_bot", "raa_bot;uf1", "uf1;uf2", "uf2;uf1"):
                out.append(Redex("RedundantFalsum", path, pair))
    return out


# ---------------------------------------------------------------------------
# One-step reduction

def reduce_step(d: Derivation, r: Redex) -> Derivation:
    try:
        n = d.at(r.path)
    except IndexError:
        raise RedexStale(r) from None
    if not any(r2 == r for r2 in find_redexes(d)):
        raise RedexStale(r)

    mgen = MarkerGen(all_markers(d))
    lgen = LabelGen(all_labels(d))
    if r.kind == "MaximalFormula":
        new = _reduce_detour(n, mgen, lgen)
    elif r.kind == "MonDisorder":
        new = _reduce_disorder(n, mgen)
    elif r.kind == "RedundantMon":
        new = _reduce_mon_pair(n, mgen)
    elif r.kind == "RedundantFalsum":
        new = _reduce_falsum(n, mgen)
    elif r.kind == "UnrestrictedRAA":
        new = _restrict_raa(n, mgen, lgen)
    elif r.kind == "UnrestrictedMon":
        new = _restrict_mon(n, mgen, lgen)
    else:
        raise ValueError(f"unknown redex kind {r.kind}")
    return replace_at(d, r.path, new)


def _override_conclusion(t: Derivation, conclusion) -> Derivation:
    """Keep the site's stated conclusion when the rebuilt subtree says the
    same thing with different surface spelling (never touch assumptions:
    their spelling is part of the open-assumption set)."""
    if t.conclusion == conclusion or t.is_assumption():
        return t
    return replace(t, conclusion=conclusion)


def _rename_colliding_freshes(t: Derivation, avoid: set, lgen) -> Derivation:
    if t.fresh is not None and t.fresh in avoid:
        t = substitute_label_deriv(t, lgen(), t.fresh)
    return replace(t, premises=tuple(
        _rename_colliding_freshes(p, avoid, lgen) for p in t.premises))


def _reduce_detour(n: Derivation, mgen, lgen) -> Derivation:
    intro = n.premises[0]
    body = intro.premises[0]
    markers = intro.discharges

    if n.rule in ("imp_e", "rimp_e"):
        minor = n.premises[1]
        result = body
        for m in sorted(markers):
            result = graft(result, m, minor, mgen)
        return _override_conclusion(result, n.conclusion)

    if n.rule in ("g_e", "h_e", "x_e"):
        minor = n.premises[1]
        y = intro.fresh
        z = n.conclusion.label
        # inner fresh labels equal to either end of the substitution would be
        # captured or merged by the textual renaming; give them new names
        body = _rename_colliding_freshes(body, {y, z} | all_labels(minor), lgen)
        body = substitute_label_deriv(body, z, y)
        for m in sorted(markers):
            body = graft(body, m, minor, mgen)
        return _override_conclusion(body, n.conclusion)

    if n.rule == "all_e":
        v = intro.fresh
        w = match_instantiation(expand(body.conclusion), v, n.conclusion)
        if w is None:
            # the instance label does not occur (vacuous quantifier)
            w = v
        body = _rename_colliding_freshes(body, {v, w}, lgen)
        body = substitute_label_deriv(body, w, v)
        return _override_conclusion(body, n.conclusion)

    raise RedexStale(n.rule)


def _reduce_disorder(n: Derivation, mgen) -> Derivation:
    upper = n.premises[0]
    base, e_upper = upper.premises
    e_lower = n.premises[1]
    eq_low = expand(e_lower.conclusion)
    mid = replace_position(_expand_entity(base.conclusion), 1, eq_low.y)
    new_upper = node("mon", mid, base, e_lower, position=1)
    return node("mon", n.conclusion, new_upper, e_upper, position=2)


def _reduce_mon_pair(n: Derivation, mgen) -> Derivation:
    upper = n.premises[0]
    base, e1 = upper.premises
    e2 = n.premises[1]
    pos = _mon_position(n)
    eq1 = expand(e1.conclusion)
    eq2 = expand(e2.conclusion)
    composed = node("mon", Eq(eq1.x, eq2.y), e1, e2, position=2)
    return node("mon", n.conclusion, base, composed, position=pos)


def _top_proof(y: str, mgen) -> Derivation:
    """Closed derivation of ``y : false -> false``."""
    k = mgen()
    return node("imp_i", Lwff(y, Implies(F_, F_)), assume(Lwff(y, F_), k),
                discharges={k})


def _strip_upper_falsum_discharges(f1: Derivation, mgen) -> Derivation:
    """Close the assumptions a collapsing falsum rule would have discharged
    by grafting the trivial proof of ``y : ~false`` at its leaves."""
    body = f1.premises[0]
    if f1.rule == "raa_bot":
        y = f1.conclusion.label
        for m in sorted(f1.discharges):
            body = graft(body, m, _top_proof(y, mgen), mgen)
    return body


def _reduce_falsum(n: Derivation, mgen) -> Derivation:
    f1 = n.premises[0]
    pair = f"{f1.rule};{n.rule}"
    if pair == "raa_bot;raa_bot":
        body = _strip_upper_falsum_discharges(f1, mgen)
        return replace(n, premises=(body,))
    if pair == "raa_bot;uf1":
        body = _strip_upper_falsum_discharges(f1, mgen)
        return replace(n, premises=(body,))
    if pair == "uf1;uf2":
        body = f1.premises[0]
        if body.conclusion.label == n.conclusion.label:
            return _override_conclusion(body, n.conclusion)
        return node("raa_bot", n.conclusion, body)
    if pair == "uf2;uf1":
        return _override_conclusion(f1.premises[0], n.conclusion)
    raise RedexStale(pair)


# ---------------------------------------------------------------------------
# Restriction of raa_bot / raa_empty / mon to atomic conclusions

def _restrict_raa(n: Derivation, mgen, lgen) -> Derivation:
    if n.rule == "raa_bot":
        return _restrict_raa_bot(n, mgen, lgen)
    return _restrict_raa_empty(n, mgen, lgen)


def _restrict_raa_bot(n: Derivation, mgen, lgen) -> Derivation:
    x = n.conclusion.label
    core = _xf(n.conclusion)
    body = n.premises[0]

    if isinstance(core, Implies):
        b, c = core.left, core.right
        m1, m2, m3 = mgen(), mgen(), mgen()
        inner = node("imp_e", Lwff(x, c),
                     assume(Lwff(x, Implies(b, c)), m1), assume(Lwff(x, b), m3))
        bot = node("imp_e", Lwff(x, F_), assume(Lwff(x, Implies(c, F_)), m2), inner)
        refutation = node("imp_i", Lwff(x, Implies(Implies(b, c), F_)), bot,
                          discharges={m1})
        for m in sorted(n.discharges):
            body = graft(body, m, refutation, mgen)
        out = node("raa_bot", Lwff(x, c), body, discharges={m2})
        return node("imp_i", n.conclusion, out, discharges={m3})

    if isinstance(core, (G, H, X)):
        b = core.body
        z = lgen()
        m1, m2, m3 = mgen(), mgen(), mgen()
        if isinstance(core, G):
            rel, e_rule, i_rule, op = Less(x, z), "g_e", "g_i", G
        elif isinstance(core, H):
            rel, e_rule, i_rule, op = Less(z, x), "h_e", "h_i", H
        else:
            rel, e_rule, i_rule, op = Prec(x, z), "x_e", "x_i", X
        inner = node(e_rule, Lwff(z, b), assume(Lwff(x, op(b)), m1),
                     assume(rel, m3))
        zbot = node("imp_e", Lwff(z, F_), assume(Lwff(z, Implies(b, F_)), m2), inner)
        xbot = node("raa_bot", Lwff(x, F_), zbot)
        refutation = node("imp_i", Lwff(x, Implies(op(b), F_)), xbot,
                          discharges={m1})
        for m in sorted(n.discharges):
            body = graft(body, m, refutation, mgen)
        out = node("raa_bot", Lwff(z, b), body, discharges={m2})
        return node(i_rule, n.conclusion, out, discharges={m3}, fresh=z)

    raise RedexStale("raa_bot")


def _restrict_raa_empty(n: Derivation, mgen, lgen) -> Derivation:
    core = expand(n.conclusion)
    body = n.premises[0]

    if isinstance(core, Empty):
        # close the discharged [empty => empty] leaves with the identity
        k = mgen()
        identity = node("rimp_i", RImplies(E_, E_), assume(E_, k), discharges={k})
        for m in sorted(n.discharges):
            body = graft(body, m, identity, mgen)
        return _override_conclusion(body, n.conclusion)

    if isinstance(core, RImplies):
        b, c = core.left, core.right
        m1, m2, m3 = mgen(), mgen(), mgen()
        inner = node("rimp_e", c, assume(RImplies(b, c), m1), assume(b, m3))
        bot = node("rimp_e", E_, assume(RImplies(c, E_), m2), inner)
        refutation = node("rimp_i", RImplies(RImplies(b, c), E_), bot,
                          discharges={m1})
        for m in sorted(n.discharges):
            body = graft(body, m, refutation, mgen)
        out = node("raa_empty", c, body, discharges={m2})
        return node("rimp_i", n.conclusion, out, discharges={m3})

    if isinstance(core, Forall):
        v2 = lgen()
        inst = substitute_label(core.body, v2, core.var)
        m1, m2 = mgen(), mgen()
        inner = node("all_e", inst, assume(core, m2))
        bot = node("rimp_e", E_, assume(RImplies(inst, E_), m1), inner)
        refutation = node("rimp_i", RImplies(core, E_), bot, discharges={m2})
        for m in sorted(n.discharges):
            body = graft(body, m, refutation, mgen)
        out = node("raa_empty", inst, body, discharges={m1})
        return node("all_i", n.conclusion, out, fresh=v2)

    raise RedexStale("raa_empty")


# ---------------------------------------------------------------------------
# Mon restriction: positional transport through arbitrary formulas

class _EqSupply:
    """Hand out usable copies of the equality subderivation: the original
    first, then marker-refreshed copies."""

    def __init__(self, eqd: Derivation, mgen):
        self.eqd = eqd
        self.mgen = mgen
        self.used = False

    def __call__(self) -> Derivation:
        if not self.used:
            self.used = True
            return self.eqd
        return refresh_internal_markers(self.eqd, self.mgen)


class _LazySymSupply:
    """Like ``_EqSupply`` for the symmetric equality, but the underlying
    derivation is only built on first use."""

    def __init__(self, eq_supply: _EqSupply, a: str, b: str, mgen):
        self.eq_supply = eq_supply
        self.a, self.b = a, b
        self.mgen = mgen
        self.built: Derivation | None = None

    def __call__(self) -> Derivation:
        if self.built is None:
            self.built = sym_deriv(self.eq_supply, self.a, self.b, self.mgen)
            return self.built
        return refresh_internal_markers(self.built, self.mgen)


def sym_deriv(eq_supply: _EqSupply, a: str, b: str, mgen) -> Derivation:
    """Derive ``b = a`` from a derivation of ``a = b`` using connectedness
    and irreflexivity (restriction-clean: all new mons are positional)."""
    conn = node("conn", AXIOMS["conn"])
    tpl = AXIOMS["conn"]
    inner1 = substitute_label(tpl.body, b, tpl.var)
    t1 = node("all_e", inner1, conn)
    inner2 = substitute_label(inner1.body, a, inner1.var)
    t2 = node("all_e", inner2, t1)

    irr = AXIOMS["irrefl_lt"]
    irr_inst = substitute_label(irr.body, b, irr.var)

    k1 = mgen()
    u1 = node("mon", Less(b, b), assume(Less(b, a), k1), eq_supply(), position=2)
    i1 = node("all_e", irr_inst, node("irrefl_lt", irr))
    u2 = node("rimp_e", E_, i1, u1)
    n1 = node("rimp_i", RImplies(Less(b, a), E_), u2, discharges={k1})

    k2 = mgen()
    n2 = node("rimp_e", expand(inner2).right, t2, n1)
    n3 = node("rimp_e", Less(a, b), n2, assume(RImplies(Eq(b, a), E_), k2))
    u3 = node("mon", Less(b, b), n3, eq_supply(), position=1)
    i2 = node("all_e", irr_inst, node("irrefl_lt", irr))
    u4 = node("rimp_e", E_, i2, u3)
    return node("raa_empty", Eq(b, a), u4, discharges={k2})


def occurrences_of(core, a: str) -> frozenset:
    """Paths of the free occurrences of label ``a`` in a core rwff."""
    if isinstance(core, (Less, Eq)):
        out = set()
        if core.x == a:
            out.add((1,))
        if core.y == a:
            out.add((2,))
        return frozenset(out)
    if isinstance(core, Empty):
        return frozenset()
    if isinstance(core, RImplies):
        return frozenset({("L",) + p for p in occurrences_of(core.left, a)}
                         | {("R",) + p for p in occurrences_of(core.right, a)})
    if isinstance(core, Forall):
        if core.var == a:
            return frozenset()
        return frozenset({("B",) + p for p in occurrences_of(core.body, a)})
    raise TypeError(f"not a core rwff: {core!r}")


def masked_subst(core, b: str, occs: frozenset, avoid):
    """Replace exactly the addressed positions by ``b``."""
    if not occs:
        return core
    if isinstance(core, (Less, Eq)):
        out = core
        for (p,) in occs:
            out = replace_position(out, p, b)
        return out
    if isinstance(core, RImplies):
        left = masked_subst(core.left, b, frozenset(p[1:] for p in occs if p[0] == "L"), avoid)
        right = masked_subst(core.right, b, frozenset(p[1:] for p in occs if p[0] == "R"), avoid)
        return RImplies(left, right)
    if isinstance(core, Forall):
        body_occs = frozenset(p[1:] for p in occs if p[0] == "B")
        var, body = core.var, core.body
        if var == b:
            from .syntax import fresh_label
            var2 = fresh_label(set(avoid) | {b}, base="u")
            body = substitute_label(body, var2, var)
            var = var2
        return Forall(var, masked_subst(body, b, body_occs, avoid))
    raise TypeError(f"not a core rwff: {core!r}")


def _transport(pi: Derivation, a: str, b: str, eq_supply, occs, mgen, lgen,
               sym_supply):
    """Build a derivation replacing the addressed ``a``-occurrences of the
    conclusion of ``pi`` by ``b``, all monotonicity uses atomic."""
    concl = pi.conclusion

    if isinstance(concl, Lwff):
        if concl.label != a or not occs:
            return pi
        formula = _xf(concl)
        if isinstance(formula, (Atom, Falsum)):
            return node("mon", Lwff(b, concl.formula), pi, eq_supply(), position=1)
        if isinstance(formula, Implies):
            fa, fb = formula.left, formula.right
            m = mgen()
            leaf = assume(Lwff(b, fa), m)
            back = _transport(leaf, b, a, sym_supply, frozenset({("F",)}),
                              mgen, lgen, eq_supply)
            app = node("imp_e", Lwff(a, fb), pi, back)
            fwd = _transport(app, a, b, eq_supply, frozenset({("F",)}),
                             mgen, lgen, sym_supply)
            return node("imp_i", Lwff(b, formula), fwd, discharges={m})
        if isinstance(formula, (G, H)):
            z = lgen()
            m = mgen()
            if isinstance(formula, G):
                leaf = assume(Less(b, z), m)
                lt = node("mon", Less(a, z), leaf, sym_supply(), position=1)
                inner = node("g_e", Lwff(z, formula.body), pi, lt)
                return node("g_i", Lwff(b, formula), inner, discharges={m}, fresh=z)
            leaf = assume(Less(z, b), m)
            lt = node("mon", Less(z, a), leaf, sym_supply(), position=2)
            inner = node("h_e", Lwff(z, formula.body), pi, lt)
            return node("h_i", Lwff(b, formula), inner, discharges={m}, fresh=z)
        if isinstance(formula, X):
            z = lgen()
            m = mgen()
            prec_b = expand(Prec(b, z))
            leaf = assume(prec_b, m)
            occ = occurrences_of(prec_b, b)
            prec_a = _transport(leaf, b, a, sym_supply, occ, mgen, lgen, eq_supply)
            inner = node("x_e", Lwff(z, formula.body), pi, prec_a)
            return node("x_i", Lwff(b, formula), inner, discharges={m}, fresh=z)
        raise TypeError(f"unexpected formula {formula!r}")

    core = expand(concl)
    if not occs:
        return pi
    if isinstance(core, (Less, Eq)):
        cur = pi
        remaining = set(core_pos for (core_pos,) in occs)
        cur_core = core
        for p in sorted(remaining):
            cur_core = replace_position(cur_core, p, b)
            cur = node("mon", cur_core, cur, eq_supply(), position=p)
        return cur
    if isinstance(core, RImplies):
        occs_l = frozenset(p[1:] for p in occs if p[0] == "L")
        occs_r = frozenset(p[1:] for p in occs if p[0] == "R")
        avoid = all_labels(pi) | {a, b}
        left_moved = masked_subst(core.left, b, occs_l, avoid)
        m = mgen()
        leaf = assume(left_moved, m)
        back = _transport(leaf, b, a, sym_supply, occs_l, mgen, lgen, eq_supply)
        back = _override_conclusion(back, core.left)
        app = node("rimp_e", core.right, pi, back)
        fwd = _transport(app, a, b, eq_supply, occs_r, mgen, lgen, sym_supply)
        return node("rimp_i", RImplies(left_moved, masked_subst(core.right, b, occs_r, avoid)),
                    fwd, discharges={m})
    if isinstance(core, Forall):
        occs_b = frozenset(p[1:] for p in occs if p[0] == "B")
        w = lgen()
        inst_body = substitute_label(core.body, w, core.var)
        inst = node("all_e", inst_body, pi)
        moved = _transport(inst, a, b, eq_supply, occs_b, mgen, lgen, sym_supply)
        return node("all_i", Forall(w, moved.conclusion), moved, fresh=w)
    raise TypeError(f"not a core rwff: {core!r}")


def _restrict_mon(n: Derivation, mgen, lgen) -> Derivation:
    kind, _ = _mon_class(n)
    pi, eqd = n.premises
    eq = expand(eqd.conclusion)
    a, b = eq.x, eq.y

    if kind == "bot":
        return node("raa_bot", n.conclusion, pi)
    if kind == "noop":
        return _override_conclusion(pi, n.conclusion)

    # two interchangeable sources of equality evidence: copies of the given
    # a = b subderivation, and copies of the derived symmetric b = a
    eq_ab = _EqSupply(eqd, mgen)
    eq_ba = _LazySymSupply(eq_ab, a, b, mgen)

    if isinstance(n.conclusion, Lwff):
        occs = frozenset({("F",)})
    else:
        occs = occurrences_of(_expand_entity(pi.conclusion), a)
    out = _transport(pi, a, b, eq_ab, occs, mgen, lgen, eq_ba)
    return _override_conclusion(out, n.conclusion)


# ---------------------------------------------------------------------------
# Driver

_PRIORITY = {
    "UnrestrictedRAA": 0,
    "UnrestrictedMon": 0,
    "MaximalFormula": 1,
    "MonDisorder": 2,
    "RedundantMon": 3,
    "RedundantFalsum": 4,
}


def _select(d: Derivation, redexes: list) -> Redex:
    best_class = min(_PRIORITY[r.kind] for r in redexes)
    pool = [r for r in redexes if _PRIORITY[r.kind] == best_class]
    if best_class == 1:
        # highest grade whose premise subtrees hold no equally-high maximal
        # formula; ties innermost then leftmost
        graded = [(grade(d.at(r.path).premises[0].conclusion), r) for r in pool]
        eligible = []
        for g, r in graded:
            above = r.path + (0,)
            dominated = any(
                g2 >= g and r2.path[:len(above)] == above and r2 is not r
                for g2, r2 in graded)
            if not dominated:
                eligible.append((g, r))
        top = max(g for g, _ in eligible)
        candidates = [r for g, r in eligible if g == top]
        return min(candidates, key=lambda r: (-len(r.path), r.path))
    return min(pool, key=lambda r: r.path)


def restrict(d: Derivation, bound: int | None = None) -> Derivation:
    """Rewrite until every falsum-rule conclusion is atomic (and never the
    relational falsum), and every mon is a positional application to an
    atomic major premise."""
    limit = step_bound() if bound is None else bound
    steps = 0
    while True:
        redexes = [r for r in find_redexes(d) if r.kind.startswith("Unrestricted")]
        if not redexes:
            return d
        if steps >= limit:
            raise NonTermination(steps)
        d = reduce_step(d, min(redexes, key=lambda r: r.path))
        steps += 1


def normalize(d: Derivation, bound: int | None = None, trace=None) -> Derivation:
    """Full pipeline: expand derived rules, restrict, then reduce to normal
    form under the deterministic strategy."""
    from .kernel import expand_derived
    limit = step_bound() if bound is None else bound
    d = expand_derived(d)
    steps = 0
    while True:
        redexes = find_redexes(d)
        if not redexes:
            return d
        if steps >= limit:
            raise NonTermination(steps)
        r = _select(d, redexes)
        d = reduce_step(d, r)
        steps += 1
        if trace is not None:
            trace.append({
                "step": steps,
                "kind": r.kind,
                "detail": r.detail,
                "site": list(r.path),
                "nodes": d.node_count(),
            })


@dataclass(frozen=True)
class NormalReport:
    normal: bool
    redexes: tuple

    def __bool__(self) -> bool:
        return self.normal


def is_normal(d: Derivation) -> NormalReport:
    rs = find_redexes(d)
    return NormalReport(not rs, tuple(rs))


# ---------------------------------------------------------------------------
# Equality modulo markers and fresh labels

def canonical_form(d: Derivation) -> Derivation:
    """Rename markers to 1.. in first-mention order, fresh labels to a
    reserved sequence, and conclusions to expanded alpha-canonical form."""
    order: list = []
    for _, n in d.walk():
        for m in sorted(n.discharges):
            if m not in order:
                order.append(m)
        if n.marker is not None and n.marker not in order:
            order.append(n.marker)
    mmap = {m: i + 1 for i, m in enumerate(order)}
    counter = itertools.count(1)

    def rename_fresh(t: Derivation) -> Derivation:
        if t.fresh is not None:
            t = substitute_label_deriv(t, f"·f{next(counter)}", t.fresh)
        return replace(t, premises=tuple(rename_fresh(p) for p in t.premises))

    def squash(t: Derivation) -> Derivation:
        return Derivation(
            t.rule, canon(t.conclusion),
            tuple(squash(p) for p in t.premises),
            marker=mmap.get(t.marker),
            discharges=frozenset(mmap[m] for m in t.discharges),
            fresh=t.fresh,
            position=t.position,
        )

    return squash(rename_fresh(d))
