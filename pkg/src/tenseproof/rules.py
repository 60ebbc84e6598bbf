"""Rule registry: identifiers, schema descriptors, axiom templates, profiles.

The checker in :mod:`tenseproof.kernel` owns the actual matching logic; this
module is the single place that says which rules exist, how many premises
they take, what they discharge, whether they carry a freshness side
condition, and which logic profile admits them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    Eq, Exists, Forall, Less, RAnd, RFormula, RImplies, RNot, ROr,
)

EXTRAS = ("first", "final", "lser", "rser", "dens", "ldiscr", "rdiscr", "mtl")


@dataclass(frozen=True)
class LogicProfile:
    """Base system plus a set of optional relational axioms / rules."""

    extras: frozenset = frozenset()

    @staticmethod
    def make(*extras: str) -> "LogicProfile":
        xs = set(extras)
        unknown = xs - set(EXTRAS)
        if unknown:
            raise ValueError(f"unknown profile extras: {sorted(unknown)}")
        if "mtl" in xs:
            # the next-step fragment presumes right-serial, right-discrete time
            xs |= {"rser", "rdiscr"}
        return LogicProfile(frozenset(xs))

    @property
    def name(self) -> str:
        if "mtl" in self.extras:
            return "mtl"
        if not self.extras:
            return "kl"
        return "kl+" + "+".join(sorted(self.extras))

    def allows(self, rule_id: str) -> bool:
        req = RULES[rule_id].requires
        return req is None or req in self.extras

    def finitely_modelable(self) -> bool:
        """Serial or dense profiles have no useful finite frames."""
        return not (self.extras & {"lser", "rser", "dens", "mtl"})


KL = LogicProfile.make()


def parse_profile(text: str) -> LogicProfile:
    text = text.strip().lower()
    if text == "kl":
        return KL
    if text == "mtl":
        return LogicProfile.make("mtl")
    if text.startswith("kl+"):
        return LogicProfile.make(*[p for p in text[3:].split("+") if p])
    raise ValueError(f"unknown profile {text!r}")


# ---------------------------------------------------------------------------
# Axiom templates (closed relational formulas)

AXIOMS: dict[str, RFormula] = {
    "refl_eq": Forall("x", Eq("x", "x")),
    "irrefl_lt": Forall("x", RNot(Less("x", "x"))),
    "trans_lt": Forall("x", Forall("y", Forall("z", RImplies(
        RAnd(Less("x", "y"), Less("y", "z")), Less("x", "z"))))),
    "conn": Forall("x", Forall("y", ROr(
        Less("x", "y"), ROr(Eq("x", "y"), Less("y", "x"))))),
    "first": Exists("x", Forall("y", RNot(Less("y", "x")))),
    "final": Exists("x", Forall("y", RNot(Less("x", "y")))),
    "lser": Forall("x", Exists("y", Less("y", "x"))),
    "rser": Forall("x", Exists("y", Less("x", "y"))),
    "dens": Forall("x", Forall("y", RImplies(
        Less("x", "y"), Exists("z", RAnd(Less("x", "z"), Less("z", "y")))))),
    "ldiscr": Forall("x", Forall("y", RImplies(
        Less("x", "y"),
        Exists("z", RAnd(Less("z", "y"),
                         RNot(Exists("u", RAnd(Less("z", "u"), Less("u", "y"))))))))),
    "rdiscr": Forall("x", Forall("y", RImplies(
        Less("x", "y"),
        Exists("z", RAnd(Less("x", "z"),
                         RNot(Exists("u", RAnd(Less("x", "u"), Less("u", "z"))))))))),
}


# ---------------------------------------------------------------------------
# Schemas

@dataclass(frozen=True)
class RuleSchema:
    name: str
    kind: str                 # "core" | "axiom" | "derived"
    system: str               # "labeled" | "relational" | "general"
    n_premises: int
    premise_patterns: tuple = ()
    conclusion_pattern: str = ""
    discharge_spec: tuple = ()     # (premise index, pattern text) pairs
    fresh_spec: str | None = None
    requires: str | None = None    # profile extra gating the rule
    axiom_template: RFormula | None = field(default=None)
    expansion: bool = False        # has a core expansion template

    @property
    def discharging(self) -> bool:
        return bool(self.discharge_spec)


def _schema(name, kind, system, n, prem=(), concl="", disch=(), fresh=None,
            requires=None, expansion=False):
    return RuleSchema(name, kind, system, n, tuple(prem), concl, tuple(disch),
                      fresh, requires,
                      AXIOMS.get(name), expansion)


RULES: dict[str, RuleSchema] = {s.name: s for s in [
    _schema("assume", "core", "general", 0, concl="any formula"),

    # labeled sub-system
    _schema("raa_bot", "core", "labeled", 1, ["y : false"], "x : A",
            disch=[(0, "x : A -> false")]),
    _schema("imp_i", "core", "labeled", 1, ["x : B"], "x : A -> B",
            disch=[(0, "x : A")]),
    _schema("imp_e", "core", "labeled", 2, ["x : A -> B", "x : A"], "x : B"),
    _schema("g_i", "core", "labeled", 1, ["y : A"], "x : G A",
            disch=[(0, "x < y")], fresh="y"),
    _schema("g_e", "core", "labeled", 2, ["x : G A", "x < y"], "y : A"),
    _schema("h_i", "core", "labeled", 1, ["y : A"], "x : H A",
            disch=[(0, "y < x")], fresh="y"),
    _schema("h_e", "core", "labeled", 2, ["x : H A", "y < x"], "y : A"),

    # relational sub-system
    _schema("raa_empty", "core", "relational", 1, ["empty"], "r",
            disch=[(0, "r => empty")]),
    _schema("rimp_i", "core", "relational", 1, ["s"], "r => s",
            disch=[(0, "r")]),
    _schema("rimp_e", "core", "relational", 2, ["r => s", "r"], "s"),
    _schema("all_i", "core", "relational", 1, ["r"], "forall x. r", fresh="x"),
    _schema("all_e", "core", "relational", 1, ["forall x. r"], "r[y/x]"),
    _schema("refl_eq", "axiom", "relational", 0, concl="forall x. x = x"),
    _schema("irrefl_lt", "axiom", "relational", 0, concl="forall x. !(x < x)"),
    _schema("trans_lt", "axiom", "relational", 0,
            concl="forall x. forall y. forall z. (x < y /\\ y < z) => x < z"),
    _schema("conn", "axiom", "relational", 0,
            concl="forall x. forall y. x < y \\/ x = y \\/ y < x"),

    # general rules bridging the two sub-systems
    _schema("mon", "core", "general", 2, ["phi", "x = y"], "phi[y/x]"),
    _schema("uf1", "core", "general", 1, ["x : false"], "empty"),
    _schema("uf2", "core", "general", 1, ["empty"], "x : false"),

    # relational axioms for extensions
    _schema("first", "axiom", "relational", 0,
            concl="exists x. forall y. !(y < x)", requires="first"),
    _schema("final", "axiom", "relational", 0,
            concl="exists x. forall y. !(x < y)", requires="final"),
    _schema("lser", "axiom", "relational", 0,
            concl="forall x. exists y. y < x", requires="lser"),
    _schema("rser", "axiom", "relational", 0,
            concl="forall x. exists y. x < y", requires="rser"),
    _schema("dens", "axiom", "relational", 0,
            concl="forall x. forall y. x < y => exists z. x < z /\\ z < y",
            requires="dens"),
    _schema("ldiscr", "axiom", "relational", 0,
            concl="forall x. forall y. x < y => "
                  "exists z. z < y /\\ !exists u. z < u /\\ u < y",
            requires="ldiscr"),
    _schema("rdiscr", "axiom", "relational", 0,
            concl="forall x. forall y. x < y => "
                  "exists z. x < z /\\ !exists u. x < u /\\ u < z",
            requires="rdiscr"),

    # next-step rules (core once the profile enables them)
    _schema("x_i", "core", "labeled", 1, ["y : A"], "x : X A",
            disch=[(0, "x <. y")], fresh="y", requires="mtl"),
    _schema("x_e", "core", "labeled", 2, ["x : X A", "x <. y"], "y : A",
            requires="mtl"),

    # derived labeled rules
    _schema("not_i", "derived", "labeled", 1, ["x : false"], "x : ~A",
            disch=[(0, "x : A")], expansion=True),
    _schema("not_e", "derived", "labeled", 2, ["x : ~A", "x : A"], "x : false",
            expansion=True),
    _schema("and_i", "derived", "labeled", 2, ["x : A", "x : B"], "x : A & B",
            expansion=True),
    _schema("and_e1", "derived", "labeled", 1, ["x : A & B"], "x : A",
            expansion=True),
    _schema("and_e2", "derived", "labeled", 1, ["x : A & B"], "x : B",
            expansion=True),
    _schema("or_i1", "derived", "labeled", 1, ["x : A"], "x : A | B",
            expansion=True),
    _schema("or_i2", "derived", "labeled", 1, ["x : B"], "x : A | B",
            expansion=True),
    _schema("or_e", "derived", "labeled", 3, ["x : A | B", "phi", "phi"], "phi",
            disch=[(1, "x : A"), (2, "x : B")], expansion=True),
    _schema("f_i", "derived", "labeled", 2, ["y : A", "x < y"], "x : F A",
            expansion=True),
    _schema("f_e", "derived", "labeled", 2, ["x : F A", "phi"], "phi",
            disch=[(1, "y : A"), (1, "x < y")], fresh="y", expansion=True),
    _schema("p_i", "derived", "labeled", 2, ["y : A", "y < x"], "x : P A",
            expansion=True),
    _schema("p_e", "derived", "labeled", 2, ["x : P A", "phi"], "phi",
            disch=[(1, "y : A"), (1, "y < x")], fresh="y", expansion=True),

    # derived relational rules
    _schema("rnot_i", "derived", "relational", 1, ["empty"], "!r",
            disch=[(0, "r")], expansion=True),
    _schema("rnot_e", "derived", "relational", 2, ["!r", "r"], "empty",
            expansion=True),
    _schema("rand_i", "derived", "relational", 2, ["r", "s"], "r /\\ s",
            expansion=True),
    _schema("rand_e1", "derived", "relational", 1, ["r /\\ s"], "r",
            expansion=True),
    _schema("rand_e2", "derived", "relational", 1, ["r /\\ s"], "s",
            expansion=True),
    _schema("ror_i1", "derived", "relational", 1, ["r"], "r \\/ s",
            expansion=True),
    _schema("ror_i2", "derived", "relational", 1, ["s"], "r \\/ s",
            expansion=True),
    _schema("ror_e", "derived", "relational", 3, ["r \\/ s", "phi", "phi"], "phi",
            disch=[(1, "r"), (2, "s")], expansion=True),
    _schema("ex_i", "derived", "relational", 1, ["r[y/x]"], "exists x. r",
            expansion=True),
    _schema("ex_e", "derived", "relational", 2, ["exists x. r", "phi"], "phi",
            disch=[(1, "r[y/x]")], fresh="y", expansion=True),
]}


INTRO_RULES = {"imp_i", "g_i", "h_i", "x_i", "rimp_i", "all_i"}
ELIM_RULES = {"imp_e", "g_e", "h_e", "x_e", "rimp_e", "all_e"}
FALSUM_RULES = {"raa_bot", "raa_empty", "uf1", "uf2"}

# detour pairs eliminated by the proper reductions; the next-step pair
# reduces exactly like the G/H ones
DETOUR_PAIRS = {
    "imp_e": "imp_i",
    "g_e": "g_i",
    "h_e": "h_i",
    "x_e": "x_i",
    "rimp_e": "rimp_i",
    "all_e": "all_i",
}


def rule_schema(rule_id: str) -> RuleSchema:
    try:
        return RULES[rule_id]
    except KeyError:
        raise KeyError(f"unknown rule {rule_id!r}") from None
