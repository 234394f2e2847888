#!/usr/bin/env python3
"""One network drop, dissected.

Samples a Poisson network around the tagged user, marks the serving station
and the interferers whose beams cover the user, and breaks the SINR into its
power components.  Also dumps the realization to CSV for external tools.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from densify import (
    Disk,
    LinkFadingConfig,
    StretchedExponential,
    UlaScaling,
    realize,
    serving_distance_quantile,
    sinr_of,
    substream,
)
from densify.geometry import dump_realization

DENSITY = 50.0  # BS per km^2


def main():
    model = StretchedExponential(gain0=1.0, decay_m=200.0, shape=1.0)
    scaling = UlaScaling()
    real = realize(DENSITY, Disk(2.0), scaling, LinkFadingConfig(), substream(2))

    print(f"stations in window    : {real.n_points}")
    print(f"antennas per station  : {real.n_antennas}")
    print(f"serving distance      : {real.serving_distance_m:.1f} m "
          f"(median would be {serving_distance_quantile(DENSITY, 0.5):.1f} m)")
    print(f"main-lobe interferers : {int(real.mainlobe_flags.sum())}")

    sample = sinr_of(real, model, real.pattern, sigma2=0.0)
    print(f"signal                : {sample.signal:.4g}")
    print(f"main-lobe interference: {sample.interference_main:.4g}")
    print(f"side-lobe interference: {sample.interference_side:.4g}")
    print(f"SINR                  : {sample.sinr:.3f}")

    dump_realization(real, "network_drop.csv")
    print("wrote network_drop.csv")

    pts = real.positions_m
    flags = real.mainlobe_flags
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.scatter(pts[~flags, 0], pts[~flags, 1], s=12, alpha=0.5, label="side-lobe interferer")
    ax.scatter(pts[flags, 0], pts[flags, 1], s=40, marker="^", color="tab:red",
               label="main-lobe interferer")
    serving = pts[real.serving_index]
    ax.scatter([serving[0]], [serving[1]], s=120, marker="*", color="tab:green",
               label="serving station")
    ax.scatter([0], [0], s=80, marker="x", color="k", label="tagged user")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig("network_drop.png", dpi=150)
    print("wrote network_drop.png")


if __name__ == "__main__":
    main()
