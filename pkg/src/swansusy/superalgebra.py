"""su(1,1) and su(1,1|1) ~ osp(2|2, R) generator sets and relation checks.

The even generators are ``K0, K+, K-`` (and ``Y``), the odd ones
``V+, V-, W+, W-``. A :class:`RelationTable` lists graded brackets between
generator pairs and their expected right-hand sides; the standard table has
every non-vanishing relation of the superalgebra plus an explicit vanishing
entry for every other pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fockspace as fs
from .errors import GradeError, LayoutError
from .fockspace import EVEN, ODD, TruncatedOperator
from .report import CheckResult

__all__ = [
    "SYMBOLS",
    "GeneratorSet",
    "RelationEntry",
    "RelationTable",
    "su11_single_mode",
    "standard_relation_table",
    "check_relations",
    "check_hermiticity",
    "casimir_constant",
]

SYMBOLS = ("K0", "K+", "K-", "Y", "V+", "V-", "W+", "W-")
_ATTR = {
    "K0": "K0", "K+": "Kplus", "K-": "Kminus", "Y": "Y",
    "V+": "Vplus", "V-": "Vminus", "W+": "Wplus", "W-": "Wminus",
}
_GRADE = {"K0": EVEN, "K+": EVEN, "K-": EVEN, "Y": EVEN,
          "V+": ODD, "V-": ODD, "W+": ODD, "W-": ODD}
IDENTITY = "1"


@dataclass(frozen=True)
class GeneratorSet:
    """Generators of su(1,1), optionally extended to su(1,1|1)."""

    layout: fs.ModeLayout
    K0: TruncatedOperator
    Kplus: TruncatedOperator
    Kminus: TruncatedOperator
    Y: Optional[TruncatedOperator] = None
    Vplus: Optional[TruncatedOperator] = None
    Vminus: Optional[TruncatedOperator] = None
    Wplus: Optional[TruncatedOperator] = None
    Wminus: Optional[TruncatedOperator] = None
    name: str = "custom"

    def __post_init__(self):
        for sym in self.symbols():
            op = self[sym]
            if op.layout != self.layout:
                raise LayoutError(f"generator {sym} acts on a different layout")
            if op.grade != _GRADE[sym]:
                raise GradeError(f"generator {sym} declared with the wrong grade")
        odd = [self.Vplus, self.Vminus, self.Wplus, self.Wminus]
        if any(o is not None for o in odd) and not all(o is not None for o in odd):
            raise ValueError("odd generators must be given all together")

    def __getitem__(self, symbol: str) -> TruncatedOperator:
        op = getattr(self, _ATTR[symbol])
        if op is None:
            raise KeyError(f"generator {symbol} is not part of this set")
        return op

    def symbols(self) -> tuple:
        return tuple(s for s in SYMBOLS if getattr(self, _ATTR[s]) is not None)

    @property
    def has_odd(self) -> bool:
        return self.Vplus is not None

    def grade_defects(self) -> dict:
        """Wrong-grade weight of every present generator (0 means exact)."""
        return {s: fs.grade_defect(self[s]) for s in self.symbols()}

    def replace(self, **changes) -> "GeneratorSet":
        kwargs = {a: getattr(self, a) for a in ("layout", "name", *_ATTR.values())}
        kwargs.update(changes)
        return GeneratorSet(**kwargs)


@dataclass(frozen=True)
class RelationEntry:
    kind: str
    left: str
    right: str
    rhs: tuple = ()

    @property
    def label(self) -> str:
        if self.kind == "anticommutator":
            return "{" + self.left + "," + self.right + "}"
        return "[" + self.left + "," + self.right + "]"

    def symbols(self) -> set:
        return {self.left, self.right} | {s for s, _ in self.rhs if s != IDENTITY}


@dataclass(frozen=True)
class RelationTable:
    entries: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def find(self, left: str, right: str) -> RelationEntry:
        for e in self.entries:
            if (e.left, e.right) == (left, right):
                return e
        raise KeyError(f"no entry for ({left}, {right})")

    def restricted_to(self, symbols) -> "RelationTable":
        keep = set(symbols) | {IDENTITY}
        return RelationTable(tuple(e for e in self.entries if e.symbols() <= keep))

    def as_list(self) -> list:
        return [
            {"bracket": e.label, "kind": e.kind, "rhs": [[s, c] for s, c in e.rhs]}
            for e in self.entries
        ]


def _kind(left: str, right: str) -> str:
    if _GRADE[left] == ODD and _GRADE[right] == ODD:
        return "anticommutator"
    return "commutator"


_NONVANISHING = {
    ("K0", "K+"): (("K+", 1.0),),
    ("K0", "K-"): (("K-", -1.0),),
    ("K+", "K-"): (("K0", -2.0),),
    ("K0", "V+"): (("V+", 0.5),),
    ("K0", "V-"): (("V-", -0.5),),
    ("K0", "W+"): (("W+", 0.5),),
    ("K0", "W-"): (("W-", -0.5),),
    ("K+", "V-"): (("V+", -1.0),),
    ("K-", "V+"): (("V-", 1.0),),
    ("K+", "W-"): (("W+", -1.0),),
    ("K-", "W+"): (("W-", 1.0),),
    ("Y", "V+"): (("V+", 0.5),),
    ("Y", "V-"): (("V-", 0.5),),
    ("Y", "W+"): (("W+", -0.5),),
    ("Y", "W-"): (("W-", -0.5),),
    ("V+", "W+"): (("K+", 1.0),),
    ("V-", "W-"): (("K-", 1.0),),
    ("V+", "W-"): (("K0", 1.0), ("Y", -1.0)),
    ("V-", "W+"): (("K0", 1.0), ("Y", 1.0)),
}


def standard_relation_table() -> RelationTable:
    """Every graded bracket between su(1,1|1) generators.

    Pairs are enumerated in the order of :data:`SYMBOLS` (left before right);
    odd generators are also paired with themselves, since ``{V+, V+}`` is not
    trivially zero. Pairs absent from the non-vanishing list get an empty
    right-hand side.
    """
    entries = []
    for i, left in enumerate(SYMBOLS):
        for right in SYMBOLS[i:]:
            if left == right and _GRADE[left] == EVEN:
                continue
            rhs = _NONVANISHING.get((left, right), ())
            entries.append(RelationEntry(_kind(left, right), left, right, rhs))
    return RelationTable(tuple(entries))


def _combination(gens: GeneratorSet, rhs, grade: int) -> TruncatedOperator:
    out = fs.zero(gens.layout, grade)
    for sym, coeff in rhs:
        op = fs.identity(gens.layout) if sym == IDENTITY else gens[sym]
        out = out + coeff * op
    return out


def check_relations(gens: GeneratorSet, table: RelationTable, projector, tol: float):
    """Numerically check each table entry on the range of ``projector``.

    The residual of an entry is ``|P([L, R} - RHS)P|_F`` divided by
    ``|P L P|_F * |P R P|_F + 1``.
    """
    results = []
    for entry in table:
        missing = entry.symbols() - set(gens.symbols()) - {IDENTITY}
        if missing:
            raise KeyError(f"{entry.label} references absent generators {sorted(missing)}")
        left, right = gens[entry.left], gens[entry.right]
        sign = 1.0 if entry.kind == "anticommutator" else -1.0
        bracket = fs.sandwich(projector, left, right) + sign * fs.sandwich(projector, right, left)
        grade = (left.grade + right.grade) % 2
        expected = fs.sandwich(projector, _combination(gens, entry.rhs, grade))
        scale = (np.linalg.norm(fs.sandwich(projector, left))
                 * np.linalg.norm(fs.sandwich(projector, right)) + 1.0)
        residual = float(np.linalg.norm(bracket - expected)) / scale
        results.append(CheckResult(f"relation {entry.label}", residual, tol))
    return results


_ADJOINT_PAIRS = (("K0", "K0"), ("K+", "K-"), ("K-", "K+"), ("Y", "Y"),
                  ("V+", "W-"), ("V-", "W+"), ("W+", "V-"), ("W-", "V+"))


def check_hermiticity(gens: GeneratorSet, projector, tol: float):
    """Check ``X^dag = Y`` for the adjoint pairs present in ``gens``."""
    present = set(gens.symbols())
    results = []
    for x, y in _ADJOINT_PAIRS:
        if x not in present or y not in present:
            continue
        lhs = fs.sandwich(projector, gens[x].dag)
        rhs = fs.sandwich(projector, gens[y])
        residual = float(np.linalg.norm(lhs - rhs)) / (float(np.linalg.norm(lhs)) + 1.0)
        results.append(CheckResult(f"hermiticity {x}^dag={y}", residual, tol))
    return results


def casimir_constant(gens: GeneratorSet, projector):
    """Value and spread of ``K0^2 - (K+K- + K-K+)/2`` on the projector range.

    Returns ``(constant, relative_deviation)`` where the deviation measures
    how far the projected Casimir is from a multiple of the identity.
    """
    c = (fs.sandwich(projector, gens.K0, gens.K0)
         - 0.5 * (fs.sandwich(projector, gens.Kplus, gens.Kminus)
                  + fs.sandwich(projector, gens.Kminus, gens.Kplus)))
    m = c.shape[0]
    constant = np.trace(c) / m
    dev = np.linalg.norm(c - constant * np.eye(m)) / max(np.linalg.norm(c), 1e-300)
    return complex(constant), float(dev)


def su11_single_mode(layout: fs.ModeLayout) -> GeneratorSet:
    """Single boson (plus optional fermion) realization.

    ``K0 = (a^dag a + 1/2)/2``, ``K+ = a^dag^2 / 2``, ``K- = a^2 / 2``; with a
    fermionic factor also ``Y = (b^dag b - 1/2)/2``, ``V+ = a^dag b^dag / sqrt2``,
    ``V- = a b^dag / sqrt2``, ``W+ = a^dag b / sqrt2``, ``W- = a b / sqrt2``.
    """
    bos, fer = layout.boson_indices, layout.fermion_indices
    if len(bos) != 1 or len(fer) > 1 or len(layout.factors) != len(bos) + len(fer):
        raise LayoutError("single-mode realization needs one boson and at most one fermion")
    a, ad = fs.boson_ops(layout, bos[0])
    one = fs.identity(layout)
    K0 = 0.5 * (ad @ a + 0.5 * one)
    Kp = 0.5 * (ad @ ad)
    Km = 0.5 * (a @ a)
    if not fer:
        return GeneratorSet(layout, K0, Kp, Km, name="single_mode")
    b, bd = fs.fermion_ops(layout, fer[0])
    r = 1.0 / math.sqrt(2.0)
    return GeneratorSet(
        layout, K0, Kp, Km,
        Y=0.5 * (bd @ b - 0.5 * one),
        Vplus=r * (ad @ bd), Vminus=r * (a @ bd),
        Wplus=r * (ad @ b), Wminus=r * (a @ b),
        name="single_mode",
    )
