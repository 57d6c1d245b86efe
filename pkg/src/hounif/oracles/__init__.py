"""Oracles: decision procedures for fragments of higher-order unification.

An oracle is a callable ``oracle(lhs, rhs, ctx) -> verdict`` where the
verdict is one of

* ``Success(csu)`` -- the constraint lies in the oracle's fragment and
  ``csu`` is a complete set of unifiers for it (an empty tuple means the
  constraint is unsolvable);
* ``NotUnifiable()`` -- the constraint provably has no unifier;
* ``NotApplicable()`` -- the oracle cannot decide this constraint.

Oracles receive the raw constraint sides together with the current
substitution and resolve them internally; unlike the main solver loop
they are free to normalize terms fully.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..subst import FreshSupply, Substitution
from ..terms import Bound, Term, spine, strip_lams


@dataclass(frozen=True)
class Success:
    csu: tuple[Substitution, ...]


@dataclass(frozen=True)
class NotUnifiable:
    pass


@dataclass(frozen=True)
class NotApplicable:
    pass


Verdict = Success | NotUnifiable | NotApplicable


@dataclass
class OracleContext:
    """Everything an oracle may consult: the substitution built so far, a
    fresh-variable supply, and (for the limit oracle) the binding counters
    of the selected constraint plus the configured limits."""

    subst: Substitution
    supply: FreshSupply
    counters: object = None
    limits: object = None
    variant: str = "complete"
    search: object = None


OracleFn = Callable[[Term, Term, OracleContext], Verdict]

_REGISTRY: dict[str, OracleFn] = {}


def register(name: str):
    def deco(fn: OracleFn) -> OracleFn:
        _REGISTRY[name] = fn
        return fn

    return deco


def resolve(name: str) -> OracleFn:
    if name == "limit" and name not in _REGISTRY:
        from .. import engine  # noqa: F401  (registers the limit oracle)
    try:
        return _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(set(_REGISTRY) | {"limit"}))
        raise KeyError(f"unknown oracle {name!r}; known oracles: {known}") from None


def eta_bound_index(arg: Term) -> int | None:
    """If ``arg`` is the eta-long form of a bound variable, return that
    variable's de Bruijn index relative to the argument's root; else None.

    A base-type bound variable is just ``Bound(i)``; a functional one of
    arity k appears as ``\\ybar_k. x y1 ... yk``.
    """
    tys, body = strip_lams(arg)
    k = len(tys)
    head, args = spine(body)
    if not isinstance(head, Bound) or head.index < k or len(args) != k:
        return None
    for j, a in enumerate(args):
        if eta_bound_index(a) != k - 1 - j:
            return None
    return head.index - k


from . import fixpoint, pattern, solid  # noqa: E402,F401  (populate the registry)
