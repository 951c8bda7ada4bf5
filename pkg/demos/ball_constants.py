import numpy as np

from cocap import Ball, CoisoIndex, SolverOptions, minimize_capacity

# The unit ball has capacity pi/2 for every k < n and pi for k = n.
# The dual solver approaches from above, so small M already gives the value.
opts = SolverOptions(M=16, starts=8)

print(f"{'n':>2} {'k':>2} {'capacity':>14} {'/ (pi/2)':>10}")
for n in (1, 2, 3):
    for k in range(n + 1):
        est = minimize_capacity(Ball(1.0, n), CoisoIndex(n, k), opts)
        print(f"{n:>2} {k:>2} {est.value:>14.10f} {est.value / (np.pi / 2):>10.6f}")

# Capacity scales with the square of the radius.
for r in (0.5, 2.0):
    est = minimize_capacity(Ball(r, 2), CoisoIndex(2, 1), opts)
    print(f"radius {r}: {est.value:.10f}, expected {np.pi * r * r / 2:.10f}")
