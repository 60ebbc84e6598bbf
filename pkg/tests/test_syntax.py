import random

import pytest

from helpers import (
    all_interpretations, all_models, atoms_of, eval_shortcut, random_entity,
    random_formula, random_rwff,
)
from tenseproof.parser import parse_formula, parse_lwff, parse_rwff
from tenseproof.semantics import eval_entity
from tenseproof.syntax import (
    Atom, Falsum, Forall, G, Implies, Less, Lwff, ProofContext, canon,
    core_eq, expand, fresh_label, grade, is_atomic, is_subformula,
    labels_of, subformulas, substitute_label,
)


def test_expand_negation():
    assert expand(parse_formula("~a")) == Implies(Atom("a"), Falsum())


def test_expand_core_is_identity():
    phi = parse_formula("p")
    assert expand(phi) == phi
    psi = parse_formula("G (p -> false) -> false")
    assert expand(psi) == psi


def test_expand_future():
    assert expand(parse_formula("F p")) == parse_formula("(G (p -> false)) -> false")


def test_expand_relational_disjunction():
    got = expand(parse_rwff("x < y \\/ x = y"))
    assert got == parse_rwff("((x < y) => empty) => x = y")


def test_expand_exists_and_prec():
    got = expand(parse_rwff("exists z. x < z"))
    assert got == expand(parse_rwff("!(forall z. !(x < z))"))
    prec = expand(parse_rwff("s <. t"))
    assert prec == expand(parse_rwff("s < t /\\ forall u1. !(s < u1) \\/ !(u1 < t)"))


@pytest.mark.parametrize("seed", range(8))
def test_expand_idempotent_random(seed):
    rng = random.Random(seed)
    for _ in range(50):
        e = random_entity(rng, 4)
        assert expand(expand(e)) == expand(e)


def test_expand_preserves_truth_small_models():
    # oracle: a native shortcut evaluator for the derived forms, checked
    # against evaluation of the expansion on every model up to 3 worlds
    rng = random.Random(99)
    for _ in range(120):
        e = random_entity(rng, 3)
        atoms = sorted(atoms_of(e)) or ["p"]
        labels = sorted(labels_of(e) if not isinstance(e, Lwff) else {e.label})
        for m in all_models(3, atoms):
            for lam in all_interpretations(m, labels):
                assert eval_entity(m, lam, expand(e)) == eval_shortcut(m, lam, e)


def test_grade_examples():
    assert grade(parse_lwff("x : false")) == 0
    assert grade(parse_rwff("forall x. !(x < x)")) == 2
    assert grade(parse_formula("G (a -> b) -> (G a -> G b)")) == 6


def test_grade_of_derived_forms_counts_expansion():
    assert grade(parse_formula("p & q")) == 3
    assert grade(parse_formula("F p")) == 3


def test_grade_invariant_under_substitution():
    rng = random.Random(3)
    for _ in range(60):
        rho = random_rwff(rng, 4)
        assert grade(substitute_label(rho, "y", "x")) == grade(rho)


def test_subformula_examples():
    a = parse_formula("a")
    assert is_subformula(a, G(a))
    assert is_subformula(a, a)
    assert not is_subformula(parse_formula("G p"), parse_formula("p"))


def test_subformula_ignores_labels_on_lwffs():
    assert is_subformula(parse_lwff("y : p"), parse_lwff("x : G p"))


def test_subformula_partial_order():
    rng = random.Random(5)
    forms = [expand(random_formula(rng, 3)) for _ in range(25)]
    for a in forms:
        assert is_subformula(a, a)
        for b in forms:
            if is_subformula(a, b) and is_subformula(b, a):
                assert canon(a) == canon(b)
            for c in forms:
                if is_subformula(a, b) and is_subformula(b, c):
                    assert is_subformula(a, c)


def test_substitution_examples():
    assert substitute_label(parse_lwff("x : p"), "y", "x") == parse_lwff("y : p")
    assert substitute_label(Less("x", "x"), "y", "x") == Less("y", "y")
    bound = parse_rwff("forall x. x < z")
    assert substitute_label(bound, "y", "x") == bound


def test_substitution_identity():
    rng = random.Random(6)
    for _ in range(40):
        rho = random_rwff(rng, 4)
        assert substitute_label(rho, "x", "x") == rho


def test_substitution_capture_avoiding():
    rho = parse_rwff("forall y. x < y")
    got = substitute_label(rho, "y", "x")
    # the binder must be renamed so the incoming label stays free
    assert isinstance(got, Forall)
    assert got.var != "y"
    assert labels_of(got) == frozenset({"y"})


def test_labels_of_examples():
    assert labels_of(parse_lwff("x : G p")) == frozenset({"x"})
    assert labels_of(parse_rwff("forall x. x < y")) == frozenset({"y"})
    ctx = ProofContext.make([parse_lwff("x : p")], [Less("x", "y")])
    assert labels_of(ctx) == frozenset({"x", "y"})


def test_fresh_label_never_collides():
    avoid = {"w1", "w2", "w3"}
    assert fresh_label(avoid) == "w4"
    assert fresh_label(set()) == "w1"


def test_is_atomic():
    assert is_atomic(parse_lwff("x : p"))
    assert is_atomic(parse_lwff("x : false"))
    assert not is_atomic(parse_lwff("x : ~p"))
    assert is_atomic(parse_rwff("x = y"))
    assert not is_atomic(parse_rwff("x <. y"))


def test_canon_alpha_equivalence():
    a = parse_rwff("forall x. !(x < x)")
    b = parse_rwff("forall z. !(z < z)")
    assert canon(a) == canon(b)
    assert core_eq(a, b)
    c = parse_rwff("forall x. !(x < y)")
    assert canon(a) != canon(c)


def test_subformulas_of_quantified():
    rho = parse_rwff("forall x. x < y => empty")
    subs = {canon(s) for s in subformulas(rho)}
    assert canon(parse_rwff("x < y")) in subs
    assert canon(parse_rwff("empty")) in subs
