"""Fingerprint pre-filtering for unifiability and matching candidates.

A term is first collapsed to an untyped first-order image: binders are
erased, a free-variable head swallows its arguments, a bound-variable
head becomes the indexed constant ``db_i``, and a constant head keeps
its encoded arguments.  The image is then sampled at a fixed tuple of
positions; each sample is one of four features:

    Sym(s)  a rigid symbol heads the subterm at the position
    A       a variable sits exactly at the position
    B       a variable sits strictly above the position
    N       the position does not exist and no variable can create it

Two fingerprints are compared componentwise with one of two tables: the
symmetric one answers "could these terms possibly unify?", the
asymmetric one answers "could the query possibly be instantiated to
equal the target?".  Both only ever report false when no substitution
can reconcile the samples, so retrieval never loses a true candidate;
it merely filters.

Fingerprints of a term population live in a fixed-depth trie, one level
per sampled position, so retrieval visits only compatible branches.
Retrievals are pure reads over a snapshot; concurrent readers are safe
as long as no insert runs at the same time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import ParseError
from .normalize import canonical
from .terms import Bound, Const, Free, Term, spine, strip_lams

# ----------------------------------------------------------------- features


@dataclass(frozen=True)
class Sym:
    """A rigid head: a constant's name, or an integer de Bruijn index
    (kept disjoint from constant names by its type)."""

    sym: Union[str, int]

    def __str__(self) -> str:
        return f"db{self.sym}" if isinstance(self.sym, int) else self.sym


class _Marker:
    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name

    __str__ = __repr__


A = _Marker("A")
B = _Marker("B")
N = _Marker("N")

Feature = Union[Sym, _Marker]
Fingerprint = tuple  # of Feature
Position = tuple  # of int, 1-based child steps; () is the root


# ----------------------------------------------------- first-order encoding


@dataclass(frozen=True)
class FOTerm:
    """Untyped first-order image; ``sym`` is None for a collapsed
    variable, a str for a constant, an int for a de Bruijn constant."""

    sym: Union[str, int, None]
    args: tuple["FOTerm", ...] = ()


_FOVAR = FOTerm(None)


def encode(t: Term) -> FOTerm:
    """Collapse a term to its first-order image (canonicalizing first)."""
    return _encode(canonical(t))


def _encode(t: Term) -> FOTerm:
    _, body = strip_lams(t)
    head, args = spine(body)
    if isinstance(head, Free):
        return _FOVAR
    sym = head.index if isinstance(head, Bound) else head.name
    return FOTerm(sym, tuple(_encode(a) for a in args))


# ------------------------------------------------------------- fingerprints


def gfpf(t: FOTerm, pos: Position) -> Feature:
    for k in pos:
        if t.sym is None:
            return B
        if not 1 <= k <= len(t.args):
            return N
        t = t.args[k - 1]
    return A if t.sym is None else Sym(t.sym)


def fp(t: FOTerm, positions: tuple[Position, ...]) -> Fingerprint:
    return tuple(gfpf(t, p) for p in positions)


def fp_ho(t: Term, positions: tuple[Position, ...]) -> Fingerprint:
    return fp(encode(t), positions)


DEFAULT_POSITIONS: tuple[Position, ...] = ((), (1,), (2,), (1, 1), (1, 2), (2, 1))


# ------------------------------------------------------------ compatibility


def feature_unif(x: Feature, y: Feature) -> bool:
    if x is B or y is B:
        return True
    if x is A or y is A:
        return x is not N and y is not N
    if x is N and y is N:
        return True
    if x is N or y is N:
        return False  # a rigid symbol against a missing position
    return x.sym == y.sym


def feature_match(query: Feature, target: Feature) -> bool:
    if query is B:
        return True
    if query is N:
        return target is N
    if query is A:
        return target is A or isinstance(target, Sym)
    return isinstance(target, Sym) and query.sym == target.sym


def compatible_unif(a: Fingerprint, b: Fingerprint) -> bool:
    return len(a) == len(b) and all(feature_unif(x, y) for x, y in zip(a, b))


def compatible_match(query: Fingerprint, target: Fingerprint) -> bool:
    return len(query) == len(target) and all(
        feature_match(x, y) for x, y in zip(query, target)
    )


# --------------------------------------------------------------------- trie


@dataclass
class FingerprintTrie:
    """Fixed-depth trie over fingerprints; leaves collect term ids."""

    depth: int
    _root: dict = field(default_factory=dict)

    def insert(self, term_id, fingerprint: Fingerprint) -> None:
        if len(fingerprint) != self.depth:
            raise ValueError("fingerprint length does not match trie depth")
        node = self._root
        for feat in fingerprint[:-1]:
            node = node.setdefault(feat, {})
        node.setdefault(fingerprint[-1], set()).add(term_id)

    def _retrieve(self, fingerprint: Fingerprint, compat) -> set:
        found: set = set()
        nodes = [self._root]
        for level, feat in enumerate(fingerprint):
            last = level == len(fingerprint) - 1
            nxt = []
            for node in nodes:
                for stored_feat, child in node.items():
                    if compat(feat, stored_feat):
                        nxt.append(child)
            nodes = nxt
            if last:
                for leaf in nodes:
                    found |= leaf
                return found
        for node in nodes:  # depth 0: everything is a candidate
            found |= node
        return found

    def retrieve_unifiable(self, fingerprint: Fingerprint) -> set:
        return self._retrieve(fingerprint, feature_unif)

    def retrieve_matching(self, fingerprint: Fingerprint) -> set:
        """Ids of stored terms the query fingerprint may instantiate to."""
        return self._retrieve(fingerprint, feature_match)


class FingerprintIndex:
    """Convenience wrapper: fingerprints terms over a fixed position
    tuple and keeps them in a trie."""

    def __init__(self, positions: tuple[Position, ...] = DEFAULT_POSITIONS):
        if not positions:
            raise ValueError("need at least one sample position")
        self.positions = tuple(tuple(p) for p in positions)
        self.trie = FingerprintTrie(len(self.positions))

    def fingerprint(self, t: Term) -> Fingerprint:
        return fp_ho(t, self.positions)

    def insert(self, term_id, t: Term) -> Fingerprint:
        f = self.fingerprint(t)
        self.trie.insert(term_id, f)
        return f

    def retrieve_unifiable(self, query: Term) -> set:
        return self.trie.retrieve_unifiable(self.fingerprint(query))

    def retrieve_matching(self, query: Term) -> set:
        return self.trie.retrieve_matching(self.fingerprint(query))


# ---------------------------------------------------------------- positions


def parse_position(text: str) -> Position:
    """Dot-separated 1-based child steps; the root is spelled "e"."""
    if text == "e":
        return ()
    parts = text.split(".")
    try:
        pos = tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"bad position {text!r}") from None
    if any(k < 1 for k in pos):
        raise ParseError(f"position steps are 1-based: {text!r}")
    return pos


def print_position(pos: Position) -> str:
    return "e" if not pos else ".".join(str(k) for k in pos)


def parse_positions(text: str) -> tuple[Position, ...]:
    return tuple(parse_position(part.strip()) for part in text.split(",") if part.strip())
