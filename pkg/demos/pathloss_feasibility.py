#!/usr/bin/env python3
"""Tour of the path-loss model families and the feasibility validator.

Builds one model per family, checks the physical-feasibility conditions
(bounded at zero, nonincreasing, finite radial gain integral), and plots the
gain curves.  Also shows why the classic unbounded power law is rejected.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from densify import (
    BoundedSingleSlope,
    MultiSlope,
    PiecewiseTable,
    StretchedExponential,
    UrbanMacro,
    radial_gain_integral,
    validate,
)

MODELS = {
    "bounded single slope (exp 4, 200 m)": BoundedSingleSlope(
        gain0=1.0, exponent=4.0, breakpoint_m=200.0
    ),
    "multi slope (2.1 to 30 m, 3.9 beyond 400 m)": MultiSlope(
        gain0=1.0, breakpoints_m=(30.0, 400.0), exponents=(2.1, 3.9)
    ),
    "stretched exponential (200 m decay)": StretchedExponential(
        gain0=1.0, decay_m=200.0, shape=1.0
    ),
    "urban macro, 28 GHz": UrbanMacro(carrier_ghz=28.0),
}


def main():
    radii = np.geomspace(1.0, 20_000.0, 400)
    fig, ax = plt.subplots(figsize=(7, 5))

    for label, model in MODELS.items():
        report = validate(model)
        status = "feasible" if report.is_feasible else "INFEASIBLE"
        print(f"{label}: {status}")
        print(f"  gain at zero     : {model.gain_at_zero:.4g}")
        print(f"  radial integral  : {report.gain_integral:.6g} m^2 "
              f"({report.gain_integral * 1e-6:.6g} km^2)")
        ax.loglog(radii, model.evaluate(radii), label=label)

    # The r^-4 power law, sampled into a table, keeps its origin singularity
    # under log-log interpolation and fails validation as it should.
    sampled = np.geomspace(1e-3, 1e6, 50)
    power_law = PiecewiseTable(sampled, sampled**-4.0)
    report = validate(power_law)
    print("sampled r^-4 power law:", "feasible" if report.is_feasible else "INFEASIBLE")
    for violation in report.violations:
        print(f"  violation: {violation.name}")

    # Tighter tolerance on the quadrature reproduces the closed forms.
    exact = radial_gain_integral(BoundedSingleSlope(exponent=4.0, breakpoint_m=1.0), 1e-10)
    print(f"\nclosed-form check: integral of r(1+r)^-4 = {exact:.12f} (exact 1/6)")

    ax.set_xlabel("distance (m)")
    ax.set_ylabel("linear gain")
    ax.set_ylim(1e-14, 2.0)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig("pathloss_models.png", dpi=150)
    print("\nwrote pathloss_models.png")


if __name__ == "__main__":
    main()
