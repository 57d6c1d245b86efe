"""Pattern oracle: Miller patterns, where every free variable is applied
to distinct bound variables.

Within this fragment unification is decidable and unitary.  The solver
below is the classic transformation algorithm: decompose rigid pairs,
invert a rigid side over a flexible head's argument list (pruning inner
variables whose arguments are not expressible), intersect argument lists
for flex-flex pairs.  An occurs-check failure or an inexpressible rigid
bound variable means there is no unifier at all.
"""

from __future__ import annotations

from ..errors import InternalError
from ..normalize import canonical
from ..subst import FreshSupply, Substitution, compose
from ..terms import (
    Bound,
    Const,
    Free,
    Term,
    arg_types,
    arity,
    arrow,
    mk_app,
    mk_lams,
    result_type,
    spine,
    strip_lams,
    type_of,
)
from . import NotApplicable, NotUnifiable, OracleContext, Success, eta_bound_index, register


class _Clash(Exception):
    """No unifier exists."""


class _Prune(Exception):
    """Restart the current pair after narrowing an inner variable."""

    def __init__(self, rho: Substitution):
        self.rho = rho


def is_pattern(t: Term) -> bool:
    """Is every free variable applied to distinct bound variables?
    Expects a canonical (beta-normal eta-long) term."""
    stack = [t]
    while stack:
        _, body = strip_lams(stack.pop())
        head, args = spine(body)
        if isinstance(head, Free):
            idxs = [eta_bound_index(a) for a in args]
            if None in idxs or len(set(idxs)) != len(idxs):
                return False
        else:
            stack.extend(args)
    return True


def _flex_args(args) -> list[int]:
    idxs = [eta_bound_index(a) for a in args]
    if None in idxs:
        raise InternalError("pattern solver saw a non-pattern argument")
    return idxs


def _invert(F: Free, inv: dict[int, int], t_body: Term, supply: FreshSupply) -> Term:
    """Rewrite the rigid side into the body of F's image: bound references
    into the constraint prefix become references to F's own binders via
    `inv` (prefix index -> argument position).  Raises _Clash when a rigid
    position mentions an unmapped prefix variable or F itself, and _Prune
    when an inner variable must first drop some arguments."""
    m = arity(F.ty)

    def go(u: Term, depth: int) -> Term:
        tys, body = strip_lams(u)
        d = depth + len(tys)
        head, args = spine(body)
        if isinstance(head, Const):
            return mk_lams(tys, mk_app(head, [go(a, d) for a in args]))
        if isinstance(head, Bound):
            if head.index >= d:
                r = head.index - d
                if r not in inv:
                    raise _Clash
                head = Bound(m - 1 - inv[r] + d, head.ty)
            return mk_lams(tys, mk_app(head, [go(a, d) for a in args]))
        # flexible head
        if head.id == F.id:
            raise _Clash  # occurs check
        keep = []
        for pos, a in enumerate(args):
            ai = eta_bound_index(a)
            if ai < d or (ai - d) in inv:
                keep.append(pos)
        if len(keep) == len(args):
            return mk_lams(tys, mk_app(head, [go(a, d) for a in args]))
        g_tys = arg_types(head.ty)
        narrowed = supply.fresh(
            arrow([g_tys[p] for p in keep], result_type(head.ty))
        )
        image = mk_lams(
            g_tys,
            mk_app(narrowed, [Bound(len(g_tys) - 1 - p, g_tys[p]) for p in keep]),
        )
        raise _Prune(Substitution(((head, canonical(image)),)))

    return go(t_body, 0)


def _bind(F: Free, body: Term) -> Substitution:
    return Substitution(((F, canonical(mk_lams(arg_types(F.ty), body))),))


def _flex_same(F: Free, us: list[int], vs: list[int], supply: FreshSupply) -> Substitution:
    tys = arg_types(F.ty)
    keep = [j for j in range(len(us)) if us[j] == vs[j]]
    fresh = supply.fresh(arrow([tys[j] for j in keep], result_type(F.ty)))
    m = len(tys)
    body = mk_app(fresh, [Bound(m - 1 - j, tys[j]) for j in keep])
    return _bind(F, body)


def _flex_diff(
    F: Free, us: list[int], G: Free, vs: list[int], supply: FreshSupply
) -> Substitution:
    f_tys, g_tys = arg_types(F.ty), arg_types(G.ty)
    common = [u for u in us if u in set(vs)]
    fresh = supply.fresh(
        arrow([f_tys[us.index(c)] for c in common], result_type(F.ty))
    )
    m, n = len(us), len(vs)
    f_body = mk_app(fresh, [Bound(m - 1 - us.index(c), f_tys[us.index(c)]) for c in common])
    g_body = mk_app(fresh, [Bound(n - 1 - vs.index(c), g_tys[vs.index(c)]) for c in common])
    return Substitution(
        (
            (F, canonical(mk_lams(f_tys, f_body))),
            (G, canonical(mk_lams(g_tys, g_body))),
        )
    )


def unify_patterns(pairs, supply: FreshSupply) -> Substitution | None:
    """MGU of the given pattern pairs, or None if there is no unifier."""
    sigma = Substitution()
    work = list(pairs)
    steps = 0
    try:
        while work:
            steps += 1
            if steps > 100_000:
                raise InternalError("pattern unification did not converge")
            s, t = work.pop()
            s = canonical(sigma.apply(s))
            t = canonical(sigma.apply(t))
            if s == t:
                continue
            tys, sbody = strip_lams(s)
            _, tbody = strip_lams(t)
            hs, sargs = spine(sbody)
            ht, targs = spine(tbody)
            sflex, tflex = isinstance(hs, Free), isinstance(ht, Free)
            if not sflex and not tflex:
                if hs != ht or len(sargs) != len(targs):
                    raise _Clash
                work.extend(
                    (mk_lams(tys, a), mk_lams(tys, b)) for a, b in zip(sargs, targs)
                )
            elif sflex and tflex and hs.id == ht.id:
                sigma = compose(_flex_same(hs, _flex_args(sargs), _flex_args(targs), supply), sigma)
            elif sflex and tflex:
                sigma = compose(
                    _flex_diff(hs, _flex_args(sargs), ht, _flex_args(targs), supply), sigma
                )
            else:
                if not sflex:
                    hs, sargs, tbody = ht, targs, sbody
                inv = {u: j for j, u in enumerate(_flex_args(sargs))}
                try:
                    sigma = compose(_bind(hs, _invert(hs, inv, tbody, supply)), sigma)
                except _Prune as p:
                    sigma = compose(p.rho, sigma)
                    work.append((s, t))
    except _Clash:
        return None
    return sigma


@register("pattern")
def pattern_oracle(lhs: Term, rhs: Term, ctx: OracleContext):
    s = canonical(ctx.subst.apply(lhs))
    t = canonical(ctx.subst.apply(rhs))
    if type_of(s) != type_of(t):
        return NotApplicable()
    if not (is_pattern(s) and is_pattern(t)):
        return NotApplicable()
    sigma = unify_patterns([(s, t)], ctx.supply)
    if sigma is None:
        return NotUnifiable()
    return Success((sigma,))
