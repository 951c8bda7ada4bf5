import numpy as np

from cocap import CoisoIndex, Ellipsoid, LpBall, SolverOptions, minimize_capacity
from cocap.dual import reconstruct_chord, verify_chord

# Reconstruct the minimising chord on an ellipsoid and check it from its
# samples alone. The chord leaves R^{n,k} and returns to the same leaf.
body = Ellipsoid.from_radii([1.0, 0.8, 1.5])
idx = CoisoIndex(3, 1)
est = minimize_capacity(body, idx, SolverOptions(M=16, starts=8))
chord = reconstruct_chord(est, body, idx)
rep = verify_chord(chord, body, idx)

print("capacity:", est.value)
print("chord action:", chord.action)
print("certified:", chord.certified)
for name, ok in rep.clauses.items():
    print(f"  {name:<26} {'pass' if ok else 'FAIL'}")
print("start:", np.round(chord.points[0], 6))
print("end:  ", np.round(chord.points[-1], 6))

with open("ellipsoid_chord.csv", "w") as fh:
    fh.write(chord.to_csv())

# The l^4 ball has zero boundary curvature on the axes; the chord is close
# but its pointwise residual stays above the certification threshold.
body = LpBall(4.0, (1.0, 1.0))
idx = CoisoIndex(2, 1)
est = minimize_capacity(body, idx, SolverOptions(M=16, starts=4))
chord = reconstruct_chord(est, body, idx)
print("l^4 ball capacity:", est.value, "ODE residual:", f"{chord.ode_residual:.2e}", "certified:", chord.certified)
