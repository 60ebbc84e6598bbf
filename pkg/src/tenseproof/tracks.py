"""Track structure of normal derivations and the subformula audit.

A track runs downward through major (or only) premises, starting at an
assumption, an axiom, or a universal-falsum conclusion, and ending at the
root, at a universal-falsum premise, or at a minor premise.  In a normal
derivation every track splits into an elimination part, an atomic central
part, and an introduction part; cross-system connections between labeled and
relational tracks happen in exactly four ways.
"""

from __future__ import annotations

from dataclasses import dataclass

from .derivation import Derivation
from .kernel import _xf
from .normalize import is_normal
from .rules import ELIM_RULES, FALSUM_RULES, INTRO_RULES, RULES
from .syntax import (
    Atom, Empty, Eq, Falsum, Implies, Less, Lwff, RImplies, canon, expand,
    is_subformula_instance, subformulas,
)


class StructureViolation(AssertionError):
    """A normal derivation whose tracks defy the expected shape: this
    signals a normalizer bug, not a user error."""


_MAJOR_INDEX = 0
_FRESH_DISCHARGERS = ("g_i", "h_i", "x_i")


@dataclass(frozen=True)
class Track:
    nodes: tuple                  # node paths, origin first
    kind: str                     # "labeled" | "relational"
    origin: str                   # "assumption" | "axiom" | "uf-conclusion"
    terminus: str                 # "conclusion" | "uf-premise" | "minor-premise"
    elimination: tuple            # indices into nodes
    central: tuple
    introduction: tuple


@dataclass(frozen=True)
class TrackLink:
    case: str                     # "i" | "ii" | "iii" | "iv" | "same-kind"
    from_track: int
    to_track: int
    at: tuple                     # path of the connecting rule application
    detail: str = ""


@dataclass(frozen=True)
class TrackReport:
    tracks: tuple
    links: tuple


def _is_axiom(n: Derivation) -> bool:
    return RULES[n.rule].kind == "axiom"


def _atomic(c) -> bool:
    if isinstance(c, Lwff):
        return isinstance(_xf(c), (Atom, Falsum))
    return isinstance(expand(c), (Less, Eq, Empty))


def tracks(d: Derivation) -> TrackReport:
    """Extract all tracks of a normal derivation, assert the three-part
    decomposition, and classify every inter-track connection."""
    if not is_normal(d).normal:
        raise ValueError("tracks are defined on normal derivations only")

    nodes = dict(d.walk())
    origins = []
    for path, n in sorted(nodes.items()):
        if n.is_assumption():
            origins.append((path, "assumption"))
        elif _is_axiom(n):
            origins.append((path, "axiom"))
        elif n.rule in ("uf1", "uf2"):
            origins.append((path, "uf-conclusion"))

    out: list[Track] = []
    owner: dict[tuple, int] = {}
    for start, origin in origins:
        chain = [start]
        path = start
        terminus = "conclusion"
        while path:
            parent_path = path[:-1]
            parent = nodes[parent_path]
            if parent.rule in ("uf1", "uf2"):
                terminus = "uf-premise"
                break
            if path[-1] != _MAJOR_INDEX:
                terminus = "minor-premise"
                break
            chain.append(parent_path)
            path = parent_path
        kind = "labeled" if isinstance(nodes[chain[0]].conclusion, Lwff) \
            else "relational"
        track = _decompose(nodes, tuple(chain), kind, origin, terminus)
        for p in chain:
            owner[p] = len(out)
        out.append(track)

    for path in nodes:
        if path not in owner:
            raise StructureViolation(f"node {path} belongs to no track")

    links = _classify_links(nodes, out, owner)
    return TrackReport(tuple(out), tuple(links))


def _decompose(nodes, chain, kind, origin, terminus) -> Track:
    n = len(chain)

    def below(j):
        """Rule application consuming chain[j], possibly outside the track."""
        path = chain[j]
        return nodes[path[:-1]] if path else None

    i = 0
    while i < n - 1:
        b = below(i)
        if b.rule in ELIM_RULES and chain[i][-1] == _MAJOR_INDEX:
            phi, psi = nodes[chain[i]].conclusion, b.conclusion
            if not is_subformula_instance(psi, phi):
                raise StructureViolation(
                    f"elimination step at {chain[i]} does not shrink the formula")
            i += 1
        else:
            break
    elim = tuple(range(0, i))

    j = i
    falsum_apps = 0
    while j < n:
        b = below(j)
        if b is None or chain[j][-1] != _MAJOR_INDEX:
            break
        in_track = j + 1 < n            # the consumer is the next track node
        is_falsum = b.rule in FALSUM_RULES
        is_mon = b.rule == "mon"
        if (in_track and (is_falsum or is_mon)) or (
                not in_track and terminus == "uf-premise"):
            if not _atomic(nodes[chain[j]].conclusion):
                raise StructureViolation(
                    f"central formula at {chain[j]} is not atomic")
            if is_falsum:
                falsum_apps += 1
            j += 1
            if not in_track:
                break
        else:
            break
    central = tuple(range(i, j))
    if falsum_apps > 1:
        raise StructureViolation("central part feeds more than one falsum rule")

    for k in range(j, n - 1):
        b = below(k)
        if b.rule not in INTRO_RULES:
            raise StructureViolation(
                f"late track node at {chain[k]} feeds a non-introduction rule")
        phi, psi = nodes[chain[k]].conclusion, b.conclusion
        if not is_subformula_instance(phi, psi):
            raise StructureViolation(
                f"introduction step at {chain[k]} does not grow the formula")
    intro = tuple(range(j, n))

    if origin == "uf-conclusion" and elim:
        raise StructureViolation("a universal-falsum track cannot eliminate")
    if terminus == "uf-premise" and intro:
        raise StructureViolation(
            "a track ending in universal falsum cannot introduce")

    return Track(chain, kind, origin, terminus, elim, central, intro)


def _classify_links(nodes, track_list, owner):
    links = []
    for ti, t in enumerate(track_list):
        last = t.nodes[-1]
        if t.terminus == "uf-premise":
            uf_path = last[:-1]
            uf = nodes[uf_path]
            tj = owner[uf_path]
            case = "iv" if uf.rule == "uf1" else "iii"
            links.append(TrackLink(case, ti, tj, uf_path, uf.rule))
        elif t.terminus == "minor-premise":
            below_path = last[:-1]
            b = nodes[below_path]
            tj = owner[below_path]
            other = track_list[tj]
            if t.kind == other.kind:
                links.append(TrackLink("same-kind", ti, tj, below_path, b.rule))
                continue
            major_idx = other.nodes.index(below_path) - 1
            if b.rule in ("g_e", "h_e", "x_e"):
                if major_idx not in other.elimination:
                    raise StructureViolation(
                        "temporal elimination fed outside an elimination part")
                links.append(TrackLink("i", ti, tj, below_path, b.rule))
            elif b.rule == "mon":
                if major_idx not in other.central:
                    raise StructureViolation(
                        "mon minor premise fed outside a central part")
                links.append(TrackLink("ii", ti, tj, below_path, b.rule))
            else:
                raise StructureViolation(
                    f"cross-system connection through {b.rule}")
    return links


# ---------------------------------------------------------------------------
# Subformula audit

@dataclass(frozen=True)
class AuditReport:
    ok: bool
    justifications: dict          # path -> clause tag
    violations: tuple             # paths


def audit_subformula(d: Derivation) -> AuditReport:
    """Justify every formula occurrence of a normal derivation.

    The labeled pool holds the subformulas of the open labeled assumptions
    and, when labeled, of the conclusion.  The relational pool holds the
    open relational assumptions, the axiom instances used, the conclusion
    when relational, plus the relational assumptions discharged by the
    fresh-label temporal rules (their accessibility side conditions license
    those occurrences; without them even simple normal derivations would
    have unjustifiable atoms).
    """
    from .kernel import open_assumptions

    ctx = open_assumptions(d)
    nodes = dict(d.walk())

    s_l = [x.formula for x in ctx.gamma]
    if isinstance(d.conclusion, Lwff):
        s_l.append(d.conclusion.formula)
    s_r = list(ctx.delta)
    if not isinstance(d.conclusion, Lwff):
        s_r.append(d.conclusion)
    for _, n in nodes.items():
        if _is_axiom(n):
            s_r.append(n.conclusion)

    discharged_by: dict[int, str] = {}
    for _, n in nodes.items():
        for m in n.discharges:
            discharged_by[m] = n.rule
    for _, n in nodes.items():
        if (n.is_assumption() and not isinstance(n.conclusion, Lwff)
                and discharged_by.get(n.marker) in _FRESH_DISCHARGERS):
            s_r.append(n.conclusion)

    sl_set = {canon(s) for f in s_l for s in subformulas(f)}

    def in_sl(formula) -> bool:
        return canon(formula) in sl_set

    def in_sr(rho) -> bool:
        return any(is_subformula_instance(rho, f) for f in s_r)

    # the specific clauses come before the generic subformula one so the
    # report names the clause that licenses the occurrence
    def justify_lwff(n) -> str | None:
        phi = n.conclusion
        core = _xf(phi)
        if (n.is_assumption() and discharged_by.get(n.marker) == "raa_bot"
                and isinstance(core, Implies)
                and isinstance(core.right, Falsum) and in_sl(core.left)):
            return "1ii"
        if isinstance(core, Falsum):
            if n.rule == "imp_e":
                major = n.premises[0]
                mcore = _xf(major.conclusion)
                if (major.is_assumption()
                        and discharged_by.get(major.marker) == "raa_bot"
                        and isinstance(mcore, Implies)
                        and isinstance(mcore.right, Falsum)
                        and in_sl(mcore.left)):
                    return "1iii"
            if n.rule == "raa_bot" and not _discharges_leaves(d, n):
                return "1iv"
            if n.rule == "uf2":
                return "1v"
        if in_sl(phi.formula):
            return "1i"
        return None

    def justify_rwff(n) -> str | None:
        rho = n.conclusion
        core = expand(rho)
        if (n.is_assumption() and discharged_by.get(n.marker) == "raa_empty"
                and isinstance(core, RImplies)
                and isinstance(core.right, Empty) and in_sr(core.left)):
            return "2ii"
        if isinstance(core, Empty):
            if n.rule == "rimp_e":
                major = n.premises[0]
                mcore = expand(major.conclusion)
                if (major.is_assumption()
                        and discharged_by.get(major.marker) == "raa_empty"
                        and isinstance(mcore, RImplies)
                        and isinstance(mcore.right, Empty)
                        and in_sr(mcore.left)):
                    return "2iii"
            if n.rule == "uf1":
                return "2iv"
        if n.rule == "mon":
            return "2v"
        if in_sr(rho):
            return "2i"
        return None

    justifications: dict = {}
    violations: list = []
    for path, n in nodes.items():
        tag = justify_lwff(n) if isinstance(n.conclusion, Lwff) else justify_rwff(n)
        if tag is None:
            violations.append(path)
        else:
            justifications[path] = tag
    return AuditReport(not violations, justifications, tuple(sorted(violations)))


def _discharges_leaves(d: Derivation, n: Derivation) -> bool:
    if not n.discharges:
        return False
    for _, leaf in d.walk():
        if leaf.is_assumption() and leaf.marker in n.discharges:
            return True
    return False
