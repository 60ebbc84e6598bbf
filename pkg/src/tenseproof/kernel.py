"""The proof checker and the derived-rule expander.

``check`` validates a derivation tree node by node: premise/conclusion
patterns, discharge bookkeeping, freshness side conditions, and profile
gating for axiom rules.  It never raises on a bad proof; it collects
violations with node paths.  ``expand_derived`` rewrites every derived-rule
node into its core template, preserving conclusion and open assumptions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .derivation import (
    Derivation, MarkerGen, all_markers, assume, map_leaves, node,
)
from .rules import KL, RULES, LogicProfile
from .syntax import (
    Atom, Empty, Eq, Falsum, Forall, G, H, Implies, Less, Lwff, Prec,
    ProofContext, RImplies, X, core_eq, expand, labels_of, substitute_label,
)

F_ = Falsum()
E_ = Empty()


@dataclass(frozen=True)
class Violation:
    path: tuple
    kind: str      # StructuralError | PatternMismatch | BadDischarge |
                   # FreshnessViolation | AxiomNotInProfile
    message: str

    def __str__(self) -> str:
        where = "/".join(map(str, self.path)) or "root"
        return f"{self.kind} at {where}: {self.message}"


@dataclass(frozen=True)
class CheckReport:
    violations: tuple
    open: ProofContext
    conclusion: object
    is_theorem: bool

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def status(self) -> str:
        return "valid" if self.ok else "invalid"


def open_assumptions(d: Derivation) -> ProofContext:
    """Leaf formulas whose markers are never discharged on their root path,
    split into labeled and relational parts (set semantics)."""
    gamma, delta = set(), set()
    for path in _open_leaf_paths(d):
        c = d.at(path).conclusion
        if isinstance(c, Lwff):
            gamma.add(c)
        else:
            delta.add(c)
    return ProofContext.make(gamma, delta)


def _open_leaf_paths(d: Derivation, prefix: tuple = ()) -> set:
    if d.is_assumption():
        return {prefix}
    opens: set = set()
    for i, p in enumerate(d.premises):
        opens |= _open_leaf_paths(p, prefix + (i,))
    if d.discharges:
        def live(path: tuple) -> bool:
            leaf = d.at(path[len(prefix):])
            return leaf.marker not in d.discharges
        opens = {p for p in opens if live(p)}
    return opens


# ---------------------------------------------------------------------------
# Matching helpers

def _xf(c) -> object:
    """Expanded core of a conclusion's formula part (labels untouched)."""
    return expand(c.formula) if isinstance(c, Lwff) else expand(c)


def match_instantiation(body, var, target):
    """Find a label ``w`` with ``body[w/var]`` core-equal to ``target``."""
    candidates = set(labels_of(target)) | {var}
    for w in sorted(candidates):
        if core_eq(substitute_label(body, w, var), target):
            return w
    return None


def _and_parts(core):
    if (isinstance(core, Implies) and isinstance(core.right, Falsum)
            and isinstance(core.left, Implies)
            and isinstance(core.left.right, Implies)
            and isinstance(core.left.right.right, Falsum)):
        return core.left.left, core.left.right.left
    return None


def _or_parts(core):
    if (isinstance(core, Implies) and isinstance(core.left, Implies)
            and isinstance(core.left.right, Falsum)):
        return core.left.left, core.right
    return None


def _f_part(core):
    if (isinstance(core, Implies) and isinstance(core.right, Falsum)
            and isinstance(core.left, G) and isinstance(core.left.body, Implies)
            and isinstance(core.left.body.right, Falsum)):
        return core.left.body.left
    return None


def _p_part(core):
    if (isinstance(core, Implies) and isinstance(core.right, Falsum)
            and isinstance(core.left, H) and isinstance(core.left.body, Implies)
            and isinstance(core.left.body.right, Falsum)):
        return core.left.body.left
    return None


def _x_part(core):
    if isinstance(core, X):
        return core.body
    return None


def _rand_parts(core):
    if (isinstance(core, RImplies) and isinstance(core.right, Empty)
            and isinstance(core.left, RImplies)
            and isinstance(core.left.right, RImplies)
            and isinstance(core.left.right.right, Empty)):
        return core.left.left, core.left.right.left
    return None


def _ror_parts(core):
    if (isinstance(core, RImplies) and isinstance(core.left, RImplies)
            and isinstance(core.left.right, Empty)):
        return core.left.left, core.right
    return None


def _exists_parts(core):
    if (isinstance(core, RImplies) and isinstance(core.right, Empty)
            and isinstance(core.left, Forall)
            and isinstance(core.left.body, RImplies)
            and isinstance(core.left.body.right, Empty)):
        return core.left.var, core.left.body.left
    return None


def _atomic_positions(core, label):
    """Label positions (1-based) of ``label`` in an atomic formula."""
    if isinstance(core, Lwff) and isinstance(core.formula, (Atom, Falsum)):
        return [1] if core.label == label else []
    if isinstance(core, (Less, Eq)):
        out = []
        if core.x == label:
            out.append(1)
        if core.y == label:
            out.append(2)
        return out
    return None  # not atomic


def replace_position(core, pos: int, new: str):
    if isinstance(core, Lwff):
        return Lwff(new, core.formula)
    if isinstance(core, (Less, Eq)):
        cls = type(core)
        return cls(new, core.y) if pos == 1 else cls(core.x, new)
    raise ValueError("positional replacement needs an atomic formula")


def mon_positions(major, minor_eq, conclusion):
    """Which single atomic position could this mon application have used?
    Returns a list of positions, or None when only replace-all explains it."""
    core = _expand_entity(major)
    a = minor_eq.x
    b = minor_eq.y
    positions = _atomic_positions(core, a)
    if positions is None:
        return None
    return [p for p in positions
            if core_eq(replace_position(core, p, b), conclusion)]


def _expand_entity(c):
    return Lwff(c.label, expand(c.formula)) if isinstance(c, Lwff) else expand(c)


# ---------------------------------------------------------------------------
# The checker

def check(d: Derivation, profile: LogicProfile = KL) -> CheckReport:
    violations: list[Violation] = []
    marker_leaves: dict[int, list] = {}
    for path, n in d.walk():
        if n.is_assumption() and n.marker is not None:
            marker_leaves.setdefault(n.marker, []).append(path)

    dischargers: dict[int, tuple] = {}
    for path, n in d.walk():
        for m in n.discharges:
            if m in dischargers:
                violations.append(Violation(
                    path, "BadDischarge",
                    f"marker {m} already discharged at another node"))
            else:
                dischargers[m] = path

    checker = _Checker(d, profile, violations, marker_leaves)
    checker.visit((), d)

    open_ctx = open_assumptions(d)
    ok = not violations
    return CheckReport(tuple(violations), open_ctx, d.conclusion,
                       ok and open_ctx.is_empty())


class _Checker:
    def __init__(self, root, profile, violations, marker_leaves):
        self.root = root
        self.profile = profile
        self.violations = violations
        self.marker_leaves = marker_leaves

    def bad(self, path, kind, message):
        self.violations.append(Violation(path, kind, message))

    # -- traversal -----------------------------------------------------

    def visit(self, path, n) -> frozenset:
        """Validate the subtree and return its open leaf paths."""
        opens = frozenset()
        for i, p in enumerate(n.premises):
            opens |= self.visit(path + (i,), p)

        if n.is_assumption():
            if n.premises:
                self.bad(path, "StructuralError", "assumption with premises")
            if n.discharges or n.fresh is not None or n.position is not None:
                self.bad(path, "StructuralError",
                         "assumption carries rule annotations")
            return frozenset({path})

        schema = RULES.get(n.rule)
        if schema is None:
            self.bad(path, "StructuralError", f"unknown rule {n.rule!r}")
            return opens
        if len(n.premises) != schema.n_premises:
            self.bad(path, "StructuralError",
                     f"{n.rule} takes {schema.n_premises} premises, "
                     f"got {len(n.premises)}")
            return opens
        if n.marker is not None:
            self.bad(path, "StructuralError", "marker on a non-assumption node")
        if (n.fresh is None) != (schema.fresh_spec is None):
            what = "missing" if n.fresh is None else "unexpected"
            self.bad(path, "StructuralError", f"{what} fresh label on {n.rule}")
        if n.discharges and not schema.discharging:
            self.bad(path, "StructuralError", f"{n.rule} cannot discharge")
        if n.position is not None and n.rule != "mon":
            self.bad(path, "StructuralError", "position only applies to mon")
        if schema.requires and schema.requires not in self.profile.extras:
            self.bad(path, "AxiomNotInProfile",
                     f"{n.rule} needs profile extra '{schema.requires}'")

        validator = getattr(self, f"rule_{n.rule}", None)
        allowed = {}
        if validator is not None:
            allowed = validator(path, n) or {}

        discharged_here = self._check_discharges(path, n, allowed)
        return opens - discharged_here

    def _check_discharges(self, path, n, allowed) -> frozenset:
        """Validate markers named at ``n``; return leaf paths they close."""
        closed: set = set()
        for m in sorted(n.discharges):
            for leaf_path in self.marker_leaves.get(m, []):
                ok_premise = False
                for i, patterns in allowed.items():
                    if leaf_path[:len(path) + 1] == path + (i,):
                        ok_premise = True
                        leaf = self.root.at(leaf_path)
                        if not any(core_eq(leaf.conclusion, pat)
                                   for pat in patterns):
                            self.bad(path, "BadDischarge",
                                     f"marker {m} leaf does not match the "
                                     f"dischargeable shape of {n.rule}")
                        break
                if not ok_premise:
                    self.bad(path, "BadDischarge",
                             f"marker {m} leaf lies outside the premise "
                             f"{n.rule} may discharge from")
                else:
                    closed.add(leaf_path)
        return frozenset(closed)

    def _fresh_ok(self, path, n, y, minor_index, extra_forbidden=()):
        """Freshness: ``y`` differs from the given labels and occurs in no
        open assumption of the designated premise other than the leaves this
        node discharges."""
        for lbl in extra_forbidden:
            if y == lbl:
                self.bad(path, "FreshnessViolation",
                         f"fresh label {y} must differ from {lbl}")
                return
        base = path + (minor_index,)
        for leaf_path in _open_leaf_paths(n.premises[minor_index], base):
            leaf = self.root.at(leaf_path)
            if leaf.marker is not None and leaf.marker in n.discharges:
                continue
            concl = leaf.conclusion
            free = ({concl.label} | labels_of(concl.formula)
                    if isinstance(concl, Lwff) else labels_of(concl))
            if y in free:
                self.bad(path, "FreshnessViolation",
                         f"fresh label {y} occurs in the open assumption "
                         f"at {'/'.join(map(str, leaf_path))}")
                return

    # -- labeled core rules ---------------------------------------------

    def _lwff(self, path, c, role) -> bool:
        if not isinstance(c, Lwff):
            self.bad(path, "PatternMismatch", f"{role} must be a labeled formula")
            return False
        return True

    def _rwff(self, path, c, role) -> bool:
        if isinstance(c, Lwff):
            self.bad(path, "PatternMismatch", f"{role} must be a relational formula")
            return False
        return True

    def rule_raa_bot(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._lwff(path, c, "conclusion") and self._lwff(path, p0, "premise")):
            return {}
        if not isinstance(expand(p0.formula), Falsum):
            self.bad(path, "PatternMismatch", "premise of raa_bot must be falsum")
        return {0: [Lwff(c.label, Implies(c.formula, F_))]}

    def rule_imp_i(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._lwff(path, c, "conclusion") and self._lwff(path, p0, "premise")):
            return {}
        core = _xf(c)
        if not isinstance(core, Implies):
            self.bad(path, "PatternMismatch", "imp_i concludes an implication")
            return {}
        if p0.label != c.label or not core_eq(p0.formula, core.right):
            self.bad(path, "PatternMismatch",
                     "imp_i premise must be the consequent at the same label")
        return {0: [Lwff(c.label, core.left)]}

    def rule_imp_e(self, path, n):
        c, p0, p1 = n.conclusion, n.premises[0].conclusion, n.premises[1].conclusion
        if not all(self._lwff(path, v, r) for v, r in
                   [(c, "conclusion"), (p0, "major premise"), (p1, "minor premise")]):
            return {}
        core = _xf(p0)
        if not isinstance(core, Implies):
            self.bad(path, "PatternMismatch", "imp_e major premise must be an implication")
            return {}
        if not (p1.label == p0.label == c.label
                and core_eq(p1.formula, core.left)
                and core_eq(c.formula, core.right)):
            self.bad(path, "PatternMismatch", "imp_e premises do not fit")
        return {}

    def _temporal_intro(self, path, n, op, discharged_rel):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._lwff(path, c, "conclusion") and self._lwff(path, p0, "premise")):
            return {}
        core = _xf(c)
        if not isinstance(core, op):
            self.bad(path, "PatternMismatch",
                     f"{n.rule} concludes a {op.__name__}-formula")
            return {}
        y = n.fresh
        if y is None:
            return {}
        if p0.label != y or not core_eq(p0.formula, core.body):
            self.bad(path, "PatternMismatch",
                     f"{n.rule} premise must assert the body at the fresh label")
        self._fresh_ok(path, n, y, 0, extra_forbidden=[c.label])
        return {0: [discharged_rel(c.label, y)]}

    def rule_g_i(self, path, n):
        return self._temporal_intro(path, n, G, lambda x, y: Less(x, y))

    def rule_h_i(self, path, n):
        return self._temporal_intro(path, n, H, lambda x, y: Less(y, x))

    def rule_x_i(self, path, n):
        return self._temporal_intro(path, n, X, lambda x, y: Prec(x, y))

    def _temporal_elim(self, path, n, op, rel_of):
        c, p0, p1 = n.conclusion, n.premises[0].conclusion, n.premises[1].conclusion
        if not (self._lwff(path, c, "conclusion") and self._lwff(path, p0, "major premise")
                and self._rwff(path, p1, "minor premise")):
            return {}
        core = _xf(p0)
        if not isinstance(core, op):
            self.bad(path, "PatternMismatch",
                     f"{n.rule} major premise must be a {op.__name__}-formula")
            return {}
        if not core_eq(c.formula, core.body):
            self.bad(path, "PatternMismatch",
                     f"{n.rule} conclusion must be the operator body")
        if not core_eq(p1, rel_of(p0.label, c.label)):
            self.bad(path, "PatternMismatch",
                     f"{n.rule} minor premise must relate the two labels")
        return {}

    def rule_g_e(self, path, n):
        return self._temporal_elim(path, n, G, lambda x, y: Less(x, y))

    def rule_h_e(self, path, n):
        return self._temporal_elim(path, n, H, lambda x, y: Less(y, x))

    def rule_x_e(self, path, n):
        return self._temporal_elim(path, n, X, lambda x, y: Prec(x, y))

    # -- relational core rules -------------------------------------------

    def rule_raa_empty(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._rwff(path, c, "conclusion") and self._rwff(path, p0, "premise")):
            return {}
        if not isinstance(expand(p0), Empty):
            self.bad(path, "PatternMismatch", "premise of raa_empty must be empty")
        return {0: [RImplies(c, E_)]}

    def rule_rimp_i(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._rwff(path, c, "conclusion") and self._rwff(path, p0, "premise")):
            return {}
        core = expand(c)
        if not isinstance(core, RImplies):
            self.bad(path, "PatternMismatch", "rimp_i concludes a relational implication")
            return {}
        if not core_eq(p0, core.right):
            self.bad(path, "PatternMismatch", "rimp_i premise must be the consequent")
        return {0: [core.left]}

    def rule_rimp_e(self, path, n):
        c, p0, p1 = n.conclusion, n.premises[0].conclusion, n.premises[1].conclusion
        if not all(self._rwff(path, v, r) for v, r in
                   [(c, "conclusion"), (p0, "major premise"), (p1, "minor premise")]):
            return {}
        core = expand(p0)
        if not isinstance(core, RImplies):
            self.bad(path, "PatternMismatch", "rimp_e major premise must be an implication")
            return {}
        if not (core_eq(p1, core.left) and core_eq(c, core.right)):
            self.bad(path, "PatternMismatch", "rimp_e premises do not fit")
        return {}

    def rule_all_i(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._rwff(path, c, "conclusion") and self._rwff(path, p0, "premise")):
            return {}
        v = n.fresh
        if v is None:
            return {}
        if not core_eq(c, Forall(v, p0)):
            self.bad(path, "PatternMismatch",
                     "all_i conclusion must generalize the premise over the "
                     "named variable")
        self._fresh_ok(path, n, v, 0)
        return {}

    def rule_all_e(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._rwff(path, c, "conclusion") and self._rwff(path, p0, "premise")):
            return {}
        core = expand(p0)
        if not isinstance(core, Forall):
            self.bad(path, "PatternMismatch", "all_e premise must be universal")
            return {}
        if match_instantiation(core.body, core.var, c) is None:
            self.bad(path, "PatternMismatch",
                     "all_e conclusion is not an instance of the body")
        return {}

    def _axiom(self, path, n):
        template = RULES[n.rule].axiom_template
        if not core_eq(n.conclusion, template):
            self.bad(path, "PatternMismatch",
                     f"conclusion of {n.rule} must be its axiom template")
        return {}

    rule_refl_eq = rule_irrefl_lt = rule_trans_lt = rule_conn = _axiom
    rule_first = rule_final = rule_lser = rule_rser = _axiom
    rule_dens = rule_ldiscr = rule_rdiscr = _axiom

    # -- general rules ----------------------------------------------------

    def rule_mon(self, path, n):
        c, p0, p1 = n.conclusion, n.premises[0].conclusion, n.premises[1].conclusion
        if not self._rwff(path, p1, "minor premise"):
            return {}
        eq = expand(p1)
        if not isinstance(eq, Eq):
            self.bad(path, "PatternMismatch", "mon minor premise must be an equality")
            return {}
        if isinstance(c, Lwff) != isinstance(p0, Lwff):
            self.bad(path, "PatternMismatch", "mon preserves the formula kind")
            return {}
        if n.position is not None:
            positions = mon_positions(p0, eq, c)
            if positions is None or n.position not in positions:
                self.bad(path, "PatternMismatch",
                         f"mon at position {n.position} does not yield the conclusion")
            return {}
        replaced_all = substitute_label(_expand_entity(p0), eq.y, eq.x)
        if core_eq(replaced_all, c):
            return {}
        positions = mon_positions(p0, eq, c)
        if positions:
            return {}
        self.bad(path, "PatternMismatch",
                 "mon conclusion is neither the full substitution nor a "
                 "single-position replacement")
        return {}

    def rule_uf1(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._rwff(path, c, "conclusion") and self._lwff(path, p0, "premise")):
            return {}
        if not isinstance(expand(p0.formula), Falsum):
            self.bad(path, "PatternMismatch", "uf1 premise must be falsum")
        if not isinstance(expand(c), Empty):
            self.bad(path, "PatternMismatch", "uf1 concludes empty")
        return {}

    def rule_uf2(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._lwff(path, c, "conclusion") and self._rwff(path, p0, "premise")):
            return {}
        if not isinstance(expand(p0), Empty):
            self.bad(path, "PatternMismatch", "uf2 premise must be empty")
        if not isinstance(expand(c.formula), Falsum):
            self.bad(path, "PatternMismatch", "uf2 concludes falsum at some label")
        return {}

    # -- derived labeled rules ---------------------------------------------

    def rule_not_i(self, path, n):
        allowed = self.rule_imp_i(path, n)
        core = _xf(n.conclusion) if isinstance(n.conclusion, Lwff) else None
        if isinstance(core, Implies) and not isinstance(core.right, Falsum):
            self.bad(path, "PatternMismatch", "not_i concludes a negation")
        return allowed

    def rule_not_e(self, path, n):
        self.rule_imp_e(path, n)
        if isinstance(n.conclusion, Lwff) and not isinstance(_xf(n.conclusion), Falsum):
            self.bad(path, "PatternMismatch", "not_e concludes falsum")
        return {}

    def _binary_shape(self, path, n, source, extractor, what):
        """Extract (A, B) from the expanded ``source`` conclusion."""
        parts = extractor(_xf(source) if isinstance(source, Lwff) else expand(source))
        if parts is None:
            self.bad(path, "PatternMismatch", f"{n.rule} needs a {what} shape")
        return parts

    def rule_and_i(self, path, n):
        c, p0, p1 = n.conclusion, n.premises[0].conclusion, n.premises[1].conclusion
        if not all(self._lwff(path, v, r) for v, r in
                   [(c, "conclusion"), (p0, "first premise"), (p1, "second premise")]):
            return {}
        parts = self._binary_shape(path, n, c, _and_parts, "conjunction")
        if parts is None:
            return {}
        a, b = parts
        if not (p0.label == p1.label == c.label
                and core_eq(p0.formula, a) and core_eq(p1.formula, b)):
            self.bad(path, "PatternMismatch", "and_i premises must be the conjuncts")
        return {}

    def _and_elim(self, path, n, pick):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._lwff(path, c, "conclusion") and self._lwff(path, p0, "premise")):
            return {}
        parts = self._binary_shape(path, n, p0, _and_parts, "conjunction")
        if parts is None:
            return {}
        if c.label != p0.label or not core_eq(c.formula, pick(parts)):
            self.bad(path, "PatternMismatch", f"{n.rule} conclusion must be a conjunct")
        return {}

    def rule_and_e1(self, path, n):
        return self._and_elim(path, n, lambda ab: ab[0])

    def rule_and_e2(self, path, n):
        return self._and_elim(path, n, lambda ab: ab[1])

    def _or_intro(self, path, n, pick):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._lwff(path, c, "conclusion") and self._lwff(path, p0, "premise")):
            return {}
        parts = self._binary_shape(path, n, c, _or_parts, "disjunction")
        if parts is None:
            return {}
        if c.label != p0.label or not core_eq(p0.formula, pick(parts)):
            self.bad(path, "PatternMismatch", f"{n.rule} premise must be a disjunct")
        return {}

    def rule_or_i1(self, path, n):
        return self._or_intro(path, n, lambda ab: ab[0])

    def rule_or_i2(self, path, n):
        return self._or_intro(path, n, lambda ab: ab[1])

    def rule_or_e(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        p1, p2 = n.premises[1].conclusion, n.premises[2].conclusion
        if not self._lwff(path, p0, "major premise"):
            return {}
        parts = self._binary_shape(path, n, p0, _or_parts, "disjunction")
        if parts is None:
            return {}
        a, b = parts
        for v, role in [(p1, "first minor"), (p2, "second minor")]:
            if isinstance(v, Lwff) != isinstance(c, Lwff) or not core_eq(v, c):
                self.bad(path, "PatternMismatch",
                         f"or_e {role} premise must conclude the conclusion")
        return {1: [Lwff(p0.label, a)], 2: [Lwff(p0.label, b)]}

    def _fp_intro(self, path, n, part_of, rel_of):
        c, p0, p1 = n.conclusion, n.premises[0].conclusion, n.premises[1].conclusion
        if not (self._lwff(path, c, "conclusion") and self._lwff(path, p0, "premise")
                and self._rwff(path, p1, "minor premise")):
            return {}
        a = part_of(_xf(c))
        if a is None:
            self.bad(path, "PatternMismatch", f"{n.rule} conclusion has the wrong shape")
            return {}
        if not core_eq(p0.formula, a):
            self.bad(path, "PatternMismatch", f"{n.rule} premise must assert the body")
        if not core_eq(p1, rel_of(c.label, p0.label)):
            self.bad(path, "PatternMismatch", f"{n.rule} minor premise must relate the labels")
        return {}

    def rule_f_i(self, path, n):
        return self._fp_intro(path, n, _f_part, lambda x, y: Less(x, y))

    def rule_p_i(self, path, n):
        return self._fp_intro(path, n, _p_part, lambda x, y: Less(y, x))

    def _fp_elim(self, path, n, part_of, rel_of):
        c, p0, p1 = n.conclusion, n.premises[0].conclusion, n.premises[1].conclusion
        if not self._lwff(path, p0, "major premise"):
            return {}
        a = part_of(_xf(p0))
        if a is None:
            self.bad(path, "PatternMismatch", f"{n.rule} major premise has the wrong shape")
            return {}
        if isinstance(p1, Lwff) != isinstance(c, Lwff) or not core_eq(p1, c):
            self.bad(path, "PatternMismatch",
                     f"{n.rule} minor premise must conclude the conclusion")
        y = n.fresh
        if y is None:
            return {}
        x = p0.label
        forbidden = [x]
        forbidden += ([c.label] if isinstance(c, Lwff) else sorted(labels_of(c)))
        self._fresh_ok(path, n, y, 1, extra_forbidden=forbidden)
        return {1: [Lwff(y, a), rel_of(x, y)]}

    def rule_f_e(self, path, n):
        return self._fp_elim(path, n, _f_part, lambda x, y: Less(x, y))

    def rule_p_e(self, path, n):
        return self._fp_elim(path, n, _p_part, lambda x, y: Less(y, x))

    # -- derived relational rules -------------------------------------------

    def rule_rnot_i(self, path, n):
        allowed = self.rule_rimp_i(path, n)
        core = expand(n.conclusion) if not isinstance(n.conclusion, Lwff) else None
        if isinstance(core, RImplies) and not isinstance(core.right, Empty):
            self.bad(path, "PatternMismatch", "rnot_i concludes a relational negation")
        return allowed

    def rule_rnot_e(self, path, n):
        self.rule_rimp_e(path, n)
        if not isinstance(n.conclusion, Lwff) and not isinstance(expand(n.conclusion), Empty):
            self.bad(path, "PatternMismatch", "rnot_e concludes empty")
        return {}

    def rule_rand_i(self, path, n):
        c, p0, p1 = n.conclusion, n.premises[0].conclusion, n.premises[1].conclusion
        if not all(self._rwff(path, v, r) for v, r in
                   [(c, "conclusion"), (p0, "first premise"), (p1, "second premise")]):
            return {}
        parts = self._binary_shape(path, n, c, _rand_parts, "relational conjunction")
        if parts is None:
            return {}
        a, b = parts
        if not (core_eq(p0, a) and core_eq(p1, b)):
            self.bad(path, "PatternMismatch", "rand_i premises must be the conjuncts")
        return {}

    def _rand_elim(self, path, n, pick):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._rwff(path, c, "conclusion") and self._rwff(path, p0, "premise")):
            return {}
        parts = self._binary_shape(path, n, p0, _rand_parts, "relational conjunction")
        if parts is None:
            return {}
        if not core_eq(c, pick(parts)):
            self.bad(path, "PatternMismatch", f"{n.rule} conclusion must be a conjunct")
        return {}

    def rule_rand_e1(self, path, n):
        return self._rand_elim(path, n, lambda ab: ab[0])

    def rule_rand_e2(self, path, n):
        return self._rand_elim(path, n, lambda ab: ab[1])

    def _ror_intro(self, path, n, pick):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._rwff(path, c, "conclusion") and self._rwff(path, p0, "premise")):
            return {}
        parts = self._binary_shape(path, n, c, _ror_parts, "relational disjunction")
        if parts is None:
            return {}
        if not core_eq(p0, pick(parts)):
            self.bad(path, "PatternMismatch", f"{n.rule} premise must be a disjunct")
        return {}

    def rule_ror_i1(self, path, n):
        return self._ror_intro(path, n, lambda ab: ab[0])

    def rule_ror_i2(self, path, n):
        return self._ror_intro(path, n, lambda ab: ab[1])

    def rule_ror_e(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        p1, p2 = n.premises[1].conclusion, n.premises[2].conclusion
        if not self._rwff(path, p0, "major premise"):
            return {}
        parts = self._binary_shape(path, n, p0, _ror_parts, "relational disjunction")
        if parts is None:
            return {}
        a, b = parts
        for v, role in [(p1, "first minor"), (p2, "second minor")]:
            if isinstance(v, Lwff) != isinstance(c, Lwff) or not core_eq(v, c):
                self.bad(path, "PatternMismatch",
                         f"ror_e {role} premise must conclude the conclusion")
        return {1: [a], 2: [b]}

    def rule_ex_i(self, path, n):
        c, p0 = n.conclusion, n.premises[0].conclusion
        if not (self._rwff(path, c, "conclusion") and self._rwff(path, p0, "premise")):
            return {}
        parts = _exists_parts(expand(c))
        if parts is None:
            self.bad(path, "PatternMismatch", "ex_i concludes an existential")
            return {}
        var, body = parts
        if match_instantiation(body, var, p0) is None:
            self.bad(path, "PatternMismatch",
                     "ex_i premise is not an instance of the body")
        return {}

    def rule_ex_e(self, path, n):
        c, p0, p1 = n.conclusion, n.premises[0].conclusion, n.premises[1].conclusion
        if not self._rwff(path, p0, "major premise"):
            return {}
        parts = _exists_parts(expand(p0))
        if parts is None:
            self.bad(path, "PatternMismatch", "ex_e major premise must be existential")
            return {}
        var, body = parts
        if isinstance(p1, Lwff) != isinstance(c, Lwff) or not core_eq(p1, c):
            self.bad(path, "PatternMismatch",
                     "ex_e minor premise must conclude the conclusion")
        y = n.fresh
        if y is None:
            return {}
        forbidden = sorted(labels_of(p0))
        forbidden += ([c.label] if isinstance(c, Lwff) else sorted(labels_of(c)))
        self._fresh_ok(path, n, y, 1, extra_forbidden=forbidden)
        return {1: [substitute_label(body, y, var)]}


# ---------------------------------------------------------------------------
# Derived-rule expansion

class ExpansionUnavailable(Exception):
    pass


def expand_derived(d: Derivation) -> Derivation:
    """Replace every derived-rule node by its core template.

    The result uses only core and axiom rules, checks valid whenever the
    input does, and has exactly the same conclusion and open assumptions.
    """
    mgen = MarkerGen(all_markers(d))

    def rec(n: Derivation) -> Derivation:
        n = replace(n, premises=tuple(rec(p) for p in n.premises))
        schema = RULES[n.rule]
        if schema.kind != "derived":
            return n
        expander = _EXPANDERS.get(n.rule)
        if expander is None:
            raise ExpansionUnavailable(n.rule)
        return expander(n, mgen)

    return rec(d)


def _conclusion_core(c):
    return Lwff(c.label, expand(c.formula)) if isinstance(c, Lwff) else expand(c)


def _split_marker_shapes(p1: Derivation, markers, first_shape, mgen):
    """Give leaves matching ``first_shape`` their own markers when a marker
    mixes the two dischargeable shapes of a two-pattern rule."""
    firsts, seconds = set(), set()
    tree = p1
    for m in sorted(markers):
        paths = [p for p, nd in tree.walk()
                 if nd.is_assumption() and nd.marker == m]
        match = [p for p in paths if core_eq(tree.at(p).conclusion, first_shape)]
        rest = [p for p in paths if p not in match]
        if match and rest:
            fresh_m = mgen()
            for p in match:
                leaf = tree.at(p)
                tree = _replace_path(tree, p, replace(leaf, marker=fresh_m))
            firsts.add(fresh_m)
            seconds.add(m)
        elif match:
            firsts.add(m)
        else:
            seconds.add(m)
    return tree, firsts, seconds


def _replace_path(d, path, new):
    from .derivation import replace_at
    return replace_at(d, path, new)


def _exp_not_i(n, mgen):
    return replace(n, rule="imp_i")


def _exp_not_e(n, mgen):
    return replace(n, rule="imp_e")


def _exp_rnot_i(n, mgen):
    return replace(n, rule="rimp_i")


def _exp_rnot_e(n, mgen):
    return replace(n, rule="rimp_e")


def _exp_and_i(n, mgen):
    x = n.conclusion.label
    a, b = _and_parts(_xf(n.conclusion))
    m = mgen()
    leaf = assume(Lwff(x, Implies(a, Implies(b, F_))), m)
    t1 = node("imp_e", Lwff(x, Implies(b, F_)), leaf, n.premises[0])
    t2 = node("imp_e", Lwff(x, F_), t1, n.premises[1])
    return node("imp_i", n.conclusion, t2, discharges={m})


def _exp_and_e1(n, mgen):
    p0 = n.premises[0]
    x = p0.conclusion.label
    a, b = _and_parts(_xf(p0.conclusion))
    m1, m2 = mgen(), mgen()
    leaf_na = assume(Lwff(x, Implies(a, F_)), m1)
    leaf_a = assume(Lwff(x, a), m2)
    t1 = node("imp_e", Lwff(x, F_), leaf_na, leaf_a)
    t2 = node("raa_bot", Lwff(x, Implies(b, F_)), t1)
    t3 = node("imp_i", Lwff(x, Implies(a, Implies(b, F_))), t2, discharges={m2})
    t4 = node("imp_e", Lwff(x, F_), p0, t3)
    return node("raa_bot", n.conclusion, t4, discharges={m1})


def _exp_and_e2(n, mgen):
    p0 = n.premises[0]
    x = p0.conclusion.label
    a, b = _and_parts(_xf(p0.conclusion))
    m1, m2 = mgen(), mgen()
    leaf_nb = assume(Lwff(x, Implies(b, F_)), m1)
    t3 = node("imp_i", Lwff(x, Implies(a, Implies(b, F_))), leaf_nb, discharges={m2})
    t4 = node("imp_e", Lwff(x, F_), p0, t3)
    return node("raa_bot", n.conclusion, t4, discharges={m1})


def _exp_or_i1(n, mgen):
    x = n.conclusion.label
    a, b = _or_parts(_xf(n.conclusion))
    m = mgen()
    leaf = assume(Lwff(x, Implies(a, F_)), m)
    t1 = node("imp_e", Lwff(x, F_), leaf, n.premises[0])
    t2 = node("raa_bot", Lwff(x, b), t1)
    return node("imp_i", n.conclusion, t2, discharges={m})


def _exp_or_i2(n, mgen):
    m = mgen()
    return node("imp_i", n.conclusion, n.premises[0], discharges={m})


def _to_empty(t: Derivation, leaf_k: Derivation) -> Derivation:
    """Continue a minor branch to the relational falsum: labeled conclusions
    contradict via the k-leaf then export with uf1; relational ones
    contradict directly."""
    c = t.conclusion
    if isinstance(c, Lwff):
        z = leaf_k.conclusion.label
        t1 = node("imp_e", Lwff(z, F_), leaf_k, t)
        return node("uf1", E_, t1)
    return node("rimp_e", E_, leaf_k, t)


def _split_markers_by_branch(n: Derivation, mgen) -> tuple:
    """Case rules may reuse one marker across both minor branches; split so
    each branch's leaves carry their own marker.  Returns the rewritten
    premises tuple plus the marker sets for branch 1 and branch 2."""
    p1, p2 = n.premises[1], n.premises[2]
    m1, m2 = set(), set()
    for m in sorted(n.discharges):
        in1 = any(nd.marker == m for _, nd in p1.walk() if nd.is_assumption())
        in2 = any(nd.marker == m for _, nd in p2.walk() if nd.is_assumption())
        if in1 and in2:
            fresh = mgen()
            def rename(leaf, m=m, fresh=fresh):
                return replace(leaf, marker=fresh) if leaf.marker == m else leaf
            p2 = map_leaves(p2, rename)
            m1.add(m)
            m2.add(fresh)
        elif in2:
            m2.add(m)
        else:
            m1.add(m)
    return (n.premises[0], p1, p2), frozenset(m1), frozenset(m2)


def _branch_to_bottom(branch: Derivation, leaf_k: Derivation, x: str) -> Derivation:
    """From a minor branch concluding the case conclusion, reach ``x : false``
    via the discharged refutation leaf."""
    c = branch.conclusion
    if isinstance(c, Lwff):
        z = leaf_k.conclusion.label
        t = node("imp_e", Lwff(z, F_), leaf_k, branch)
        if z == x:
            return t
        return node("raa_bot", Lwff(x, F_), t)
    t = node("rimp_e", E_, leaf_k, branch)
    return node("uf2", Lwff(x, F_), t)


def _exp_or_e(n, mgen):
    (p0, p1, p2), m1, m2 = _split_markers_by_branch(n, mgen)
    x = p0.conclusion.label
    a, b = _or_parts(_xf(p0.conclusion))
    c = n.conclusion
    k = mgen()
    if isinstance(c, Lwff):
        leaf_k = assume(Lwff(c.label, Implies(c.formula, F_)), k)
    else:
        leaf_k = assume(RImplies(c, E_), k)
    t3 = node("imp_i", Lwff(x, Implies(a, F_)),
              _branch_to_bottom(p1, leaf_k, x), discharges=m1)
    t4 = node("imp_e", Lwff(x, b), p0, t3)
    v3 = node("imp_i", Lwff(x, Implies(b, F_)),
              _branch_to_bottom(p2, leaf_k, x), discharges=m2)
    v4 = node("imp_e", Lwff(x, F_), v3, t4)
    if isinstance(c, Lwff):
        return node("raa_bot", c, v4, discharges={k})
    t5 = node("uf1", E_, v4)
    return node("raa_empty", c, t5, discharges={k})


def _exp_ror_e(n, mgen):
    (p0, p1, p2), m1, m2 = _split_markers_by_branch(n, mgen)
    a, b = _ror_parts(expand(p0.conclusion))
    c = n.conclusion
    k = mgen()
    if isinstance(c, Lwff):
        leaf_k = assume(Lwff(c.label, Implies(c.formula, F_)), k)
    else:
        leaf_k = assume(RImplies(c, E_), k)
    t3 = node("rimp_i", RImplies(a, E_), _to_empty(p1, leaf_k), discharges=m1)
    t4 = node("rimp_e", b, p0, t3)
    v3 = node("rimp_i", RImplies(b, E_), _to_empty(p2, leaf_k), discharges=m2)
    v4 = node("rimp_e", E_, v3, t4)
    if isinstance(c, Lwff):
        t5 = node("uf2", Lwff(c.label, F_), v4)
        return node("raa_bot", c, t5, discharges={k})
    return node("raa_empty", c, v4, discharges={k})


def _exp_f_i(n, mgen):
    p0, p1 = n.premises
    x = n.conclusion.label
    y = p0.conclusion.label
    a = _f_part(_xf(n.conclusion))
    m = mgen()
    leaf = assume(Lwff(x, G(Implies(a, F_))), m)
    t1 = node("g_e", Lwff(y, Implies(a, F_)), leaf, p1)
    t2 = node("imp_e", Lwff(y, F_), t1, p0)
    t3 = node("raa_bot", Lwff(x, F_), t2)
    return node("imp_i", n.conclusion, t3, discharges={m})


def _exp_p_i(n, mgen):
    p0, p1 = n.premises
    x = n.conclusion.label
    y = p0.conclusion.label
    a = _p_part(_xf(n.conclusion))
    m = mgen()
    leaf = assume(Lwff(x, H(Implies(a, F_))), m)
    t1 = node("h_e", Lwff(y, Implies(a, F_)), leaf, p1)
    t2 = node("imp_e", Lwff(y, F_), t1, p0)
    t3 = node("raa_bot", Lwff(x, F_), t2)
    return node("imp_i", n.conclusion, t3, discharges={m})


def _exp_fp_elim(n, mgen, part_of, op_cls, intro_rule):
    p0, p1 = n.premises
    x = p0.conclusion.label
    y = n.fresh
    a = part_of(_xf(p0.conclusion))
    c = n.conclusion
    body_shape = Lwff(y, a)
    p1, m_body, m_rel = _split_marker_shapes(p1, n.discharges, body_shape, mgen)
    k = mgen()
    if isinstance(c, Lwff):
        leaf_k = assume(Lwff(c.label, Implies(c.formula, F_)), k)
        t1 = node("imp_e", Lwff(c.label, F_), leaf_k, p1)
        t2 = node("raa_bot", Lwff(y, F_), t1)
    else:
        leaf_k = assume(RImplies(c, E_), k)
        t1 = node("rimp_e", E_, leaf_k, p1)
        t2 = node("uf2", Lwff(y, F_), t1)
    t3 = node("imp_i", Lwff(y, Implies(a, F_)), t2, discharges=m_body)
    t4 = node(intro_rule, Lwff(x, op_cls(Implies(a, F_))), t3,
              discharges=m_rel, fresh=y)
    t5 = node("imp_e", Lwff(x, F_), p0, t4)
    if isinstance(c, Lwff):
        return node("raa_bot", c, t5, discharges={k})
    t6 = node("uf1", E_, t5)
    return node("raa_empty", c, t6, discharges={k})


def _exp_f_e(n, mgen):
    return _exp_fp_elim(n, mgen, _f_part, G, "g_i")


def _exp_p_e(n, mgen):
    return _exp_fp_elim(n, mgen, _p_part, H, "h_i")


def _exp_rand_i(n, mgen):
    a, b = _rand_parts(expand(n.conclusion))
    m = mgen()
    leaf = assume(RImplies(a, RImplies(b, E_)), m)
    t1 = node("rimp_e", RImplies(b, E_), leaf, n.premises[0])
    t2 = node("rimp_e", E_, t1, n.premises[1])
    return node("rimp_i", n.conclusion, t2, discharges={m})


def _exp_rand_e1(n, mgen):
    p0 = n.premises[0]
    a, b = _rand_parts(expand(p0.conclusion))
    m1, m2 = mgen(), mgen()
    leaf_na = assume(RImplies(a, E_), m1)
    leaf_a = assume(a, m2)
    t1 = node("rimp_e", E_, leaf_na, leaf_a)
    t2 = node("raa_empty", RImplies(b, E_), t1)
    t3 = node("rimp_i", RImplies(a, RImplies(b, E_)), t2, discharges={m2})
    t4 = node("rimp_e", E_, p0, t3)
    return node("raa_empty", n.conclusion, t4, discharges={m1})


def _exp_rand_e2(n, mgen):
    p0 = n.premises[0]
    a, b = _rand_parts(expand(p0.conclusion))
    m1, m2 = mgen(), mgen()
    leaf_nb = assume(RImplies(b, E_), m1)
    t3 = node("rimp_i", RImplies(a, RImplies(b, E_)), leaf_nb, discharges={m2})
    t4 = node("rimp_e", E_, p0, t3)
    return node("raa_empty", n.conclusion, t4, discharges={m1})


def _exp_ror_i1(n, mgen):
    a, b = _ror_parts(expand(n.conclusion))
    m = mgen()
    leaf = assume(RImplies(a, E_), m)
    t1 = node("rimp_e", E_, leaf, n.premises[0])
    t2 = node("raa_empty", b, t1)
    return node("rimp_i", n.conclusion, t2, discharges={m})


def _exp_ror_i2(n, mgen):
    m = mgen()
    return node("rimp_i", n.conclusion, n.premises[0], discharges={m})


def _exp_ex_i(n, mgen):
    var, body = _exists_parts(expand(n.conclusion))
    w = match_instantiation(body, var, n.premises[0].conclusion)
    m = mgen()
    leaf = assume(Forall(var, RImplies(body, E_)), m)
    inst = substitute_label(RImplies(body, E_), w, var)
    t1 = node("all_e", inst, leaf)
    t2 = node("rimp_e", E_, t1, n.premises[0])
    return node("rimp_i", n.conclusion, t2, discharges={m})


def _exp_ex_e(n, mgen):
    p0, p1 = n.premises
    var, body = _exists_parts(expand(p0.conclusion))
    y = n.fresh
    c = n.conclusion
    k = mgen()
    if isinstance(c, Lwff):
        leaf_k = assume(Lwff(c.label, Implies(c.formula, F_)), k)
    else:
        leaf_k = assume(RImplies(c, E_), k)
    t1 = _to_empty(p1, leaf_k)
    t2 = node("rimp_i", substitute_label(RImplies(body, E_), y, var), t1,
              discharges=n.discharges)
    t3 = node("all_i", Forall(y, substitute_label(RImplies(body, E_), y, var)),
              t2, fresh=y)
    t4 = node("rimp_e", E_, p0, t3)
    if isinstance(c, Lwff):
        t5 = node("uf2", Lwff(c.label, F_), t4)
        return node("raa_bot", c, t5, discharges={k})
    return node("raa_empty", c, t4, discharges={k})


_EXPANDERS = {
    "not_i": _exp_not_i, "not_e": _exp_not_e,
    "rnot_i": _exp_rnot_i, "rnot_e": _exp_rnot_e,
    "and_i": _exp_and_i, "and_e1": _exp_and_e1, "and_e2": _exp_and_e2,
    "or_i1": _exp_or_i1, "or_i2": _exp_or_i2, "or_e": _exp_or_e,
    "f_i": _exp_f_i, "f_e": _exp_f_e, "p_i": _exp_p_i, "p_e": _exp_p_e,
    "rand_i": _exp_rand_i, "rand_e1": _exp_rand_e1, "rand_e2": _exp_rand_e2,
    "ror_i1": _exp_ror_i1, "ror_i2": _exp_ror_i2, "ror_e": _exp_ror_e,
    "ex_i": _exp_ex_i, "ex_e": _exp_ex_e,
}
