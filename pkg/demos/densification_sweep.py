#!/usr/bin/env python3
"""The headline experiment at demo scale: SINR and ASE vs density.

Sweeps base-station density over four decades for sub-linear, linear, and
super-linear antenna scaling.  Linear scaling pins the SINR near its analytic
limit and buys ASE proportional to density; sub-linear scaling lets
interference win (SINR decays, ASE flattens); super-linear overshoots.
500 trials per point keeps this to about a minute; the shipped
configs/acceptance.yaml runs the same sweep at full precision.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from densify import (
    LimitParams,
    LinkFadingConfig,
    SimConfig,
    StretchedExponential,
    UlaScaling,
    evaluate_mean_limit,
    sweep,
)

DENSITIES = [1.0, 10.0, 100.0, 1000.0, 10_000.0]
MODEL = StretchedExponential(gain0=1.0, decay_m=200.0, shape=1.0)
EXPONENTS = {0.25: "sub-linear (0.25)", 1.0: "linear", 1.5: "super-linear (1.5)"}


def main():
    results = {}
    for index, exponent in enumerate(EXPONENTS):
        config = SimConfig(
            model=MODEL,
            scaling=UlaScaling(density_exponent=exponent),
            fading=LinkFadingConfig(),
            window=None,  # sized per density by the adequacy rule
            sigma2=0.0,
            trials=500,
            master_seed=42,
            seed_path=(index,),
        )
        results[exponent] = sweep(DENSITIES, config)
        row = ", ".join(f"{p.mean_sinr:.3g}" for p in results[exponent])
        print(f"{EXPONENTS[exponent]:>20}: mean SINR = [{row}]")

    limit = evaluate_mean_limit(LimitParams.from_scaling(MODEL, UlaScaling()))
    print(f"\ndense-network limit (linear scaling): {limit:.3f}")

    fig, (ax_sinr, ax_ase) = plt.subplots(1, 2, figsize=(11, 4.5))
    for exponent, label in EXPONENTS.items():
        points = results[exponent]
        lams = [p.density_per_km2 for p in points]
        ax_sinr.loglog(lams, [p.mean_sinr for p in points], "o-", label=label)
        ax_ase.loglog(lams, [p.ase_bps_hz_m2 for p in points], "o-", label=label)
    ax_sinr.axhline(limit, color="k", ls=":", label="analytic limit")
    ax_sinr.set_xlabel("BS density (per km$^2$)")
    ax_sinr.set_ylabel("mean SINR")
    ax_sinr.legend(fontsize=8)
    ax_sinr.grid(alpha=0.3, which="both")
    ax_ase.set_xlabel("BS density (per km$^2$)")
    ax_ase.set_ylabel("ASE (bps/Hz/m$^2$)")
    ax_ase.legend(fontsize=8)
    ax_ase.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig("densification_sweep.png", dpi=150)
    print("wrote densification_sweep.png")


if __name__ == "__main__":
    main()
