#!/usr/bin/env python3
"""How the two-level beam abstraction scales with antenna count.

Shows the uniform-linear-array rule (main gain N, beamwidth 1.782/N,
tabulated side lobe), verifies that the main/side gain ratio grows linearly
in N, and compares the step pattern against the true array response.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from densify import UlaScaling, ula_array_response
from densify.antenna import ula_gain_ratio_slope


def main():
    scaling = UlaScaling()
    print("N    main    side      beamwidth   ratio/N")
    for n in (1, 4, 16, 64, 256, 1024):
        p = scaling.pattern_for(n)
        ratio = p.main_gain / p.side_gain / n
        print(f"{n:<5d}{p.main_gain:<8.0f}{p.side_gain:<10.4f}{p.beamwidth_rad:<12.5f}{ratio:.4f}")
    print(f"asymptotic ratio slope: {ula_gain_ratio_slope('tabulated'):.4f}")

    # Step abstraction vs the physical array factor for a 32-element array.
    n = 32
    pattern = scaling.pattern_for(n)
    boresight = ula_array_response(n, 0.0)
    thetas = np.linspace(-0.5, 0.5, 4001)
    array_gain = np.array(
        [n * abs(np.vdot(boresight, ula_array_response(n, t))) ** 2 for t in thetas]
    )
    # Normalized spatial angle is half the physical angle near boresight.
    half_width_theta = pattern.beamwidth_rad / 4.0

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(thetas, array_gain, lw=1.0, label="array factor, N=32")
    step = np.where(np.abs(thetas) <= half_width_theta, pattern.main_gain, pattern.side_gain)
    ax.semilogy(thetas, step, lw=2.0, label="step abstraction")
    ax.set_xlabel("normalized spatial angle")
    ax.set_ylabel("gain")
    ax.set_ylim(1e-4, 2 * n)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig("beam_pattern_vs_array.png", dpi=150)
    print("wrote beam_pattern_vs_array.png")

    # Antenna-count maps for the three scaling regimes.
    densities = np.geomspace(1.0, 1e4, 9)
    for exponent in (0.5, 1.0, 1.5):
        s = UlaScaling(density_exponent=exponent)
        counts = [s.antennas_for_density(d) for d in densities]
        print(f"exponent {exponent}: N over density grid {counts}")


if __name__ == "__main__":
    main()
