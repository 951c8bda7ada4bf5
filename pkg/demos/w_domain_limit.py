import numpy as np

from cocap.spectrum import is_star_shaped, planar_chord_actions, w_domain_curve

# The smoothed W-domain has exactly two chords: a cap near the unit
# half-disc and a long bottom arc. As eps shrinks the cap action falls
# toward pi/2, which is the capacity of the (unbounded) limit domain.
N = 3
print(f"{'eps':>8} {'cap action':>14} {'cap - pi/2':>12} {'bottom':>12} {'chords':>6}")
for eps in (0.01, 0.005, 0.0025, 0.00125):
    w = w_domain_curve(N, eps)
    sp = planar_chord_actions(w.curve)
    cap, bottom = sp.values
    print(f"{eps:>8} {cap:>14.10f} {cap - np.pi / 2:>12.3e} {bottom:>12.6f} {len(sp):>6}")
    assert np.allclose(sp.values, sorted(w.expected_actions), atol=1e-9)

w = w_domain_curve(N, 0.01)
print("star-shaped about the origin:", is_star_shaped(w.curve))
print("area of the domain:", round(w.area, 8))
for e in planar_chord_actions(w.curve):
    print(f"  {e.action:.10f}  {e.label}")

# boundary samples for plotting elsewhere
with open("w_domain.csv", "w") as fh:
    fh.write(w.curve.to_csv(4000))
print("wrote w_domain.csv")
