"""What the decidable-fragment oracles buy over raw search.

Three constraints, each inside a fragment that is decided outright:

* a fixpoint problem (bare variable vs. a term containing it) that raw
  search can never refute;
* a pattern problem, solved by a unique most general unifier;
* a solid problem, likewise solved without any branching.

Run with:  python3 demos/oracle_shortcuts.py
"""

from hounif import EngineConfig, parse_problem, print_unifier, solve

FIXPOINT = """
tp i.
const f : i > i.
var G : i.
unify: G =?= f G.
"""

PATTERN = """
tp i.
const g : i > i > i.
var F : i > i > i.
var G : i > i > i.
unify: \\x:i. \\y:i. F x y =?= \\x:i. \\y:i. G y x.
"""

SOLID = """
tp i.
const a : i.
const f : i > i.
const g : i > i > i.
var F : i > i.
var G : i > i.
unify: F (f a) =?= g a (G a).
"""


def run(title, text, cfg, limit=None, max_pulls=200_000):
    problem = parse_problem(text)
    stream = solve(problem.goals, cfg)
    found = stream.unifiers(limit=limit, max_pulls=max_pulls)
    print(f"{title}  [variant: {cfg.variant}, "
          f"oracles: {', '.join(cfg.oracles) or 'none'}]")
    for sigma in found:
        for line in print_unifier(sigma, problem).splitlines():
            print(f"    {line}")
    print(f"  status: {stream.status}, transitions: {sum(stream.stats.values())}")
    oracle_work = {k: v for k, v in stream.stats.items() if k.startswith("oracle")}
    if oracle_work:
        print(f"  oracle verdicts: {oracle_work}")
    print()
    return sum(stream.stats.values())


if __name__ == "__main__":
    run("G =?= f G", FIXPOINT, EngineConfig(oracles=("fixpoint",)))
    # Without the oracle this problem has no finite refutation; the
    # pragmatic variant at least gives up once its limits are spent.
    run("G =?= f G", FIXPOINT, EngineConfig(variant="pragmatic", oracles=()))

    # Transitions to the first unifier, with and without the oracle.  The
    # oracle returns the unique most general solution in one verdict; raw
    # search branches its way to some (less general) solution.
    with_oracle = run("\\x y. F x y =?= \\x y. G y x", PATTERN,
                      EngineConfig(oracles=("pattern",)), limit=1)
    without = run("\\x y. F x y =?= \\x y. G y x  (same, no oracles)", PATTERN,
                  EngineConfig(oracles=()), limit=1, max_pulls=10_000)
    print(f"pattern fragment: {with_oracle} transitions with the oracle, "
          f"{without} without\n")

    run("F (f a) =?= g a (G a)", SOLID, EngineConfig(oracles=("solid",)))
