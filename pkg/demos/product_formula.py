from cocap import Ball, CoisoIndex, Product, SolverOptions, minimize_capacity
from cocap.calculus import closed_form_capacity, effective_indices

# A product of discs D(r_1) x ... x D(r_n). The first k discs see a full turn
# (pi r^2) and the others a half turn (pi r^2 / 2); the capacity is the
# smallest of these.
radii = (1.0, 0.9, 1.2)
body = Product(tuple(Ball(r, 1) for r in radii))
n = len(radii)

# the index recursion hands each factor its own k_i
for k in range(n + 1):
    print(f"k={k}: factor indices {effective_indices(k, [1] * n)}")

opts = SolverOptions(M=16, starts=6)
print(f"{'k':>2} {'closed form':>14} {'solver':>14} {'rel. diff':>10}")
for k in range(n + 1):
    idx = CoisoIndex(n, k)
    exact = closed_form_capacity(body, idx)
    val = minimize_capacity(body, idx, opts).value
    print(f"{k:>2} {exact:>14.10f} {val:>14.10f} {(val - exact) / exact:>10.2e}")

# Mixed factors: a 4D ball times a disc.
mixed = Product((Ball(1.0, 2), Ball(0.8, 1)))
for k in range(4):
    print(f"ball(1, n=2) x disc(0.8), k={k}: {closed_form_capacity(mixed, CoisoIndex(3, k)):.10f}")
