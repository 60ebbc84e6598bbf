"""Proof kernel, normalizer and bounded semantic oracle for labeled natural
deduction over linear tense logic and its relational extensions."""

from .syntax import (
    And, Atom, Empty, Eq, Exists, F, Falsum, Forall, G, H, Implies, Less,
    Lwff, Not, Or, P, Prec, ProofContext, RAnd, RImplies, RNot, ROr, Top, X,
    canon, core_eq, expand, grade, is_atomic, is_subformula, labels_of,
    substitute_label,
)
from .parser import ParseError, parse, parse_formula, parse_lwff, parse_rwff, render
from .rules import AXIOMS, KL, LogicProfile, RULES, parse_profile, rule_schema
from .derivation import Derivation, assume, from_json, load, node, to_json
from .kernel import CheckReport, Violation, check, expand_derived, open_assumptions
from .normalize import (
    NonTermination, Redex, find_redexes, is_normal, normalize, reduce_step,
    restrict,
)
from .tracks import AuditReport, StructureViolation, Track, audit_subformula, tracks
from .semantics import (
    Countermodel, FinitelyVacuous, Interpretation, Model, UnboundLabel,
    check_frame, entails, eval_entity, find_countermodel, soundness_probe,
)
from .corpus import corpus_entries, run_corpus

__all__ = [name for name in dir() if not name.startswith("_")]
