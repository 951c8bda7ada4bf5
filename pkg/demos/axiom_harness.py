from cocap import Ball, CoisoIndex, Ellipsoid, Product, SolverOptions
from cocap.calculus import axiom_harness, closed_form_capacity
from cocap.bodies import Scaled

# Score conformality, translation invariance and monotonicity on a few bodies.
opts = SolverOptions(M=16, starts=6)
for body, idx in [
    (Ball(1.0, 2), CoisoIndex(2, 1)),
    (Ellipsoid.from_radii([1.0, 1.5]), CoisoIndex(2, 0)),
    (Product((Ball(1.0, 1), Ball(1.2, 1))), CoisoIndex(2, 1)),
]:
    rep = axiom_harness(body, idx, opts)
    print(type(body).__name__, idx)
    print(rep.table())
    print()


# A deliberately wrong evaluator: it forgets to square the dilation factor.
def linear_in_scale(body, idx, anchor=None):
    if isinstance(body, Scaled):
        return body.factor * closed_form_capacity(body.base, idx)
    return closed_form_capacity(body, idx)


rep = axiom_harness(Ball(1.0, 2), CoisoIndex(2, 1), evaluate=linear_in_scale)
print("mis-scaled evaluator, failing checks:", rep.failed)
