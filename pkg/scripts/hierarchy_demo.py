"""Three hierarchy steps from a constant and from an n=1 Lamé pair, with invariant checks."""
from lamekit.elliptic import EllipticInvariants
from lamekit.fields import ScalarField
from lamekit.lame import even_pair
from lamekit.numerics import Grid
from lamekit.symcore import hierarchy_step, invariant_report, make_pair


def run(label, pair, alpha, steps=3):
    print(label)
    for k in range(steps):
        pair = hierarchy_step(pair, 0.5 + k, alpha, grid=Grid(pair.domain[0], pair.domain[1], 129))
        r = invariant_report(pair, 50)
        print(
            f"  step {k + 1}: case={pair.case:<10} c_w={r['cw']:+.6e} "
            f"lie_rel={r['lie_residual_rel']:.1e} cw_dev={r['cw_deviation']:.1e} ok={r['lie_ok'] and r['cw_ok']}"
        )


if __name__ == "__main__":
    const = make_pair(ScalarField.constant(1.0, 1), ScalarField.constant(1.0, 3), (-0.8, 0.8), c_w=1.0)
    run("constant w=1", const, (1.0, 0.3, 0.2))
    run("Lamé n=1, g2=4, g3=0, c0=0.5", even_pair(1, 0.5, EllipticInvariants(4.0, 0.0), (0.4, 2.2)), (1.0, 0.1, -0.1))
