#!/usr/bin/env python3
"""Walk through the exact set arithmetic on small hand-sized sets.

Covers factor-id merging, dependency-preserving addition, and the exact
matrix-set/vector-set product, checking each identity numerically.
"""

import numpy as np

from ncreach import (ConstrainedPolyMatZonotope, ConstrainedPolyZonotope,
                     FactorContext, cpmz_evaluate, evaluate_cpz, exact_add,
                     exact_multiply, merge_id)

rng = np.random.default_rng(0)

print("=" * 70)
print("1. Merging factor identifiers")
print("=" * 70)

# Two constrained polynomial zonotopes that share the factor with id 1.
p1 = ConstrainedPolyZonotope(
    [0, 2, 1], [[0, 1], [3, 2], [1, 5]], [[4, 1], [0, 2]],
    [[1, 2], [0, 0], [3, 4]], [2, 0, 2], [[4, 2], [0, 2]], [1, 2])
p2 = ConstrainedPolyZonotope(
    [3, 3, 4], [[2, 2], [3, 0], [1, 4]], [[3, 2], [3, 0]],
    [[1, 3], [2, 4]], [2, 5], [[2, 0], [2, 3]], [1, 3])

q1, q2 = merge_id(p1, p2)
print("common ids:", q1.id)
print("first set, padded exponent matrix:\n", q1.E)
print("second set, row-mapped exponent matrix:\n", q2.E)

# Merging never changes the represented sets: evaluations agree exactly.
a = {1: 0.3, 2: -0.7, 3: 0.5}
before = evaluate_cpz(p1, a)[0]
after = evaluate_cpz(q1, a)[0]
print("evaluation drift after merging:", np.max(np.abs(before - after)))

print()
print("=" * 70)
print("2. Exact addition keeps dependencies")
print("=" * 70)

s = exact_add(p1, p2)
val = evaluate_cpz(s, a)[0]
print("sum evaluated:", val)
print("parents summed:", evaluate_cpz(p1, a)[0] + evaluate_cpz(p2, a)[0])

# Adding a set to itself doubles every point rather than widening the set,
# because both copies share the same factors.
double = exact_add(p1, p1)
print("P + P at a =", evaluate_cpz(double, a)[0],
      " (2x P:", 2 * evaluate_cpz(p1, a)[0], ")")

print()
print("=" * 70)
print("3. Exact multiplication of a matrix set with a state set")
print("=" * 70)

ctx = FactorContext(start=10)
yid = ctx.allocate(1)
pid = ctx.allocate(1)
# scalar matrix set [1, 3] times the state interval [-1, 1]
y = ConstrainedPolyMatZonotope(
    np.array([[2.0]]), np.array([[[1.0]]]), np.eye(1, dtype=np.int64),
    np.zeros((0, 0, 0)), np.zeros((0, 0)), np.zeros((1, 0), dtype=np.int64), yid)
p = ConstrainedPolyZonotope(
    [0.0], [[1.0]], [[1]], np.zeros((0, 0)), np.zeros(0),
    np.zeros((1, 0), dtype=np.int64), pid)

prod = exact_multiply(y, p)
print("product generators:", prod.G, "  exponents:\n", prod.E)

for _ in range(3):
    a = {int(yid[0]): rng.uniform(-1, 1), int(pid[0]): rng.uniform(-1, 1)}
    lhs = evaluate_cpz(prod, a)[0][0]
    rhs = cpmz_evaluate(y, a)[0][0, 0] * evaluate_cpz(p, a)[0][0]
    print(f"  alpha={a}:  (Y x P)(a) = {lhs:+.6f},  Y(a) * P(a) = {rhs:+.6f}")
