"""Fingerprint-indexed retrieval of unifiable and matchable terms.

Stores a batch of closed terms in a fingerprint trie, then answers
unifiability and matching queries by candidate prefiltering: every
truly compatible stored term comes back (no false negatives), while
structurally clashing ones are filtered without touching the engine.

Run with:  python3 demos/term_retrieval.py
"""

import random

from hounif import (
    DEFAULT_POSITIONS,
    EngineConfig,
    FingerprintIndex,
    fp_ho,
    parse_problem,
    print_term,
    solve,
)

SIGNATURE = """
tp i.
const a : i.
const b : i.
const f : i > i.
const g : i > i > i.
var F : i > i.
var X : i.
var Y : i.

unify: a =?= a.
"""


def build_terms():
    """A mixed bag of closed terms over one small signature, written in
    the surface syntax for readability."""
    texts = [
        "f a", "f b", "f (f a)", "f X", "g a b", "g X b", "g (f a) Y",
        "b", "X", "g b (f (f b))", "f (g a a)", "g (f X) (f Y)",
    ]
    base = parse_problem(SIGNATURE)
    terms = []
    for text in texts:
        problem = parse_problem(SIGNATURE.replace("a =?= a", f"{text} =?= {text}"))
        terms.append((text, problem.goals[0][0]))
    return base, terms


def main():
    problem, terms = build_terms()
    index = FingerprintIndex(DEFAULT_POSITIONS)
    print("stored terms:")
    for tid, (text, term) in enumerate(terms):
        index.insert(tid, term)
        print(f"  {tid:2d}  {text}")
    print()

    for qtext in ("f X", "g a Y", "f (f b)"):
        qterm = parse_problem(SIGNATURE.replace("a =?= a", f"{qtext} =?= {qtext}")).goals[0][0]
        cands = sorted(index.retrieve_unifiable(qterm))
        print(f"query-unif {qtext!r}: candidates {cands} "
              f"({len(terms) - len(cands)} of {len(terms)} filtered)")
        # The trie never filters a true positive: confirm each candidate
        # and check the complement stays empty-handed.
        confirmed = []
        for tid, (text, term) in enumerate(terms):
            stream = solve([(qterm, term)], EngineConfig(max_steps=2_000))
            if stream.unifiers(limit=1, max_pulls=500):
                confirmed.append(tid)
        print(f"                   engine-confirmed {confirmed}")
        assert set(confirmed) <= set(cands)
    print()

    fp = fp_ho(terms[0][1], DEFAULT_POSITIONS)
    print(f"fingerprint of 'f a' at the default positions: {fp}")


if __name__ == "__main__":
    main()
