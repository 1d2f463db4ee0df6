"""A 2*pi-periodic upright motion of a pendulum pushed sideways by 0.3 cos t.

Newton's method on the period map finds the orbit. Its monodromy has
determinant one because the field does not depend on the velocity. A pair of
constant lower and upper solutions brackets the orbit.

Run ``python docs/examples/periodic_orbit.py [--plot out.png]``.
"""

import argparse
import math

import numpy as np

from oscillab import forcing as fc
from oscillab.models import pendulum_field, pendulum_window
from oscillab.periodic import (UpperLowerPair, find_periodic_with_fallback, orbit_between,
                               verify_upper_lower)
from oscillab.wazewski import pendulum_segment

F = 0.3


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--plot", help="write the orbit and its bounds to this file")
    args = parser.parse_args()

    T = 2 * math.pi
    orbit = find_periodic_with_fallback(pendulum_field(fc.cos(F)), T, None, pendulum_window(),
                                        segment=pendulum_segment())
    print(f"ic = {orbit.ic.y}, residual {orbit.residual:.1e}, {orbit.newton_iters} Newton steps")
    print("multipliers", np.round(orbit.multipliers, 4), f"det - 1 = {orbit.determinant - 1:.1e}")

    alpha = 0.99 * math.atan(1 / F)
    pair = UpperLowerPair.constant(alpha, math.pi - alpha, T)
    rep = verify_upper_lower(lambda t, u: F * math.cos(t) * math.sin(u) - math.cos(u), pair)
    print(f"bounds [{alpha:.4f}, {math.pi - alpha:.4f}] valid: {rep.passed}, "
          f"orbit inside: {orbit_between(orbit, pair)}")

    if args.plot:
        import matplotlib.pyplot as plt

        ts, ys = orbit.samples()
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(ts, ys[:, 0], label="x(t)")
        ax.axhline(alpha, color="tab:green", ls="--", label="alpha, beta")
        ax.axhline(math.pi - alpha, color="tab:green", ls="--")
        ax.axhline(math.pi / 2, color="k", lw=0.5)
        ax.set_xlabel("t")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)


if __name__ == "__main__":
    main()
