#!/usr/bin/env python3
"""Regenerate tests/fixtures/periodic_reference.json.

Builds the n-step graph relation for the correspondence by iterated
resultants over exact integers (sympy), restricts to the diagonal z = w,
and factors the resulting one-variable polynomial exactly. Roots of each
factor are the period-n points; the factor exponent is the multiplicity.

This is deliberately independent of the C++ implementation: different
algebra system, different elimination order, exact arithmetic throughout.
Rerun only when the reference set needs to be extended, then commit the
refreshed JSON. Requires sympy and numpy.

Usage: python3 scripts/periodic_reference.py
"""

import json
import os

import numpy as np
import sympy as sp

z, w, x = sp.symbols("z w x")

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures",
                   "periodic_reference.json")


def graph_poly(a_int):
    """One-step graph polynomial with the pole of J cleared, exact coefficients."""
    a = sp.Integer(a_int)
    A = a + 1

    def g(u, v):
        return sp.expand(u ** 2 * (2 * v - A) ** 2
                         + u * (2 * v - A) * (A * v - 2 * a)
                         + (A * v - 2 * a) ** 2
                         - 3 * (2 * v - A) ** 2)

    return g


def truth_set(a_int, n_target):
    g = graph_poly(a_int)
    gi = g(z, w)
    for _ in range(2, n_target + 1):
        step = sp.resultant(sp.Poly(gi.subs(w, x), x), sp.Poly(g(x, w), x), x)
        gi = sp.primitive(sp.Poly(sp.expand(step), z, w))[1].as_expr()
    out = []
    for poly, mult in sp.factor_list(sp.expand(gi.subs(w, z)))[1]:
        for r in sp.Poly(poly, z).nroots(n=25):
            out.append((complex(r).real, complex(r).imag, mult))
    return sorted(out)


def main():
    fix = {}
    for a_val in (4, 7):
        fix[str(a_val)] = {str(n): truth_set(a_val, n) for n in (1, 2, 3, 4)}
    fix["5"] = {"1": truth_set(5, 1), "2": truth_set(5, 2)}
    with open(OUT, "w") as f:
        json.dump(fix, f, indent=1)
    sizes = {k: {kk: len(vv) for kk, vv in v.items()} for k, v in fix.items()}
    print("saved:", sizes)


if __name__ == "__main__":
    main()
