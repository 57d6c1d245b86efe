"""Enumerating complete sets of unifiers from Python.

Builds two classic problems directly against the library API: one whose
complete set of unifiers is finite (two elements, then the stream
exhausts) and one whose set is infinite (the stream is bounded by the
caller instead).

Run with:  python3 demos/enumerate_unifiers.py
"""

from hounif import (
    App,
    Base,
    Bound,
    Const,
    EngineConfig,
    Free,
    Lam,
    arrow,
    parse_problem,
    print_unifier,
    solve,
)

I = Base("i")


def show(problem, stream, limit=None, max_pulls=50_000):
    for k, sigma in enumerate(stream.unifiers(limit=limit, max_pulls=max_pulls), 1):
        print(f"  unifier {k}:")
        for line in print_unifier(sigma, problem).splitlines():
            print(f"    {line}")
    print(f"  status: {stream.status}   (pulls: {stream.pulls})\n")


def finite_problem():
    print("F (G a) =?= F b  -- exactly two incomparable solutions")
    problem = parse_problem(
        """
        tp i.
        const a : i.
        const b : i.
        var F : i > i.
        var G : i > i.
        unify: F (G a) =?= F b.
        """
    )
    show(problem, solve(problem.goals, EngineConfig()))


def infinite_problem():
    print("\\x. F (f x) =?= \\x. f (F x)  -- infinitely many solutions")
    problem = parse_problem(
        """
        tp i.
        const f : i > i.
        var F : i > i.
        unify: \\x:i. F (f x) =?= \\x:i. f (F x).
        """
    )
    # The stream is lazy: asking for four unifiers does a bounded amount
    # of work even though the full enumeration would never terminate.
    show(problem, solve(problem.goals, EngineConfig()), limit=4)


def hand_built_problem():
    print("the same constraints can be built as plain terms")
    f = Const("f", arrow([I], I))
    F = Free(0, arrow([I], I))
    lhs = Lam(I, App(F, App(f, Bound(0, I))))
    rhs = Lam(I, App(f, App(F, Bound(0, I))))
    stream = solve([(lhs, rhs)], EngineConfig())
    for k, sigma in enumerate(stream.unifiers(limit=3), 1):
        print(f"  unifier {k}: F maps to {sigma.image_of(0)!r}")
    print(f"  status: {stream.status}\n")


if __name__ == "__main__":
    finite_problem()
    infinite_problem()
    hand_built_problem()
