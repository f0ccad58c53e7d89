"""Locate the exceptional point of a lossy mode pair and map its spectrum.

Two coupled modes -- a readout resonator and a flux-tunable partner with
engineered loss -- coalesce when the loss asymmetry reaches four times the
coupling.  The script prints the eigenvalue branches while the partner
loss is ramped through that point, the numerically located coalescence,
and a transmission map versus flux of the kind swept in experiments.

Run from the repository root:  python3 scripts/ep_flux_map_demo.py
"""

import math

import numpy as np

from qcrlab import FluxMap, TwoModeParams, eigenvalues, ep_locus, transmission_map

MHZ = 2.0 * math.pi * 1e6


def main():
    w1 = 2.0 * math.pi * 5.223e9
    g = 8.0 * MHZ
    base = TwoModeParams(omega1=w1, kappa1=0.8 * MHZ, omega2=w1,
                         kappa2=32.0 * MHZ, g=g)

    print(f"{'kappa2/g':>9} {'Re split (MHz)':>15} {'Im split (MHz)':>15}")
    for k2 in np.linspace(0.0, 8.0, 9) * g:
        a, b = eigenvalues(TwoModeParams(omega1=w1, kappa1=base.kappa1,
                                         omega2=w1, kappa2=float(k2), g=g))
        print(f"{k2 / g:9.2f} {abs(a.real - b.real) / MHZ:15.4f} "
              f"{abs(a.imag - b.imag) / MHZ:15.4f}")

    locus = ep_locus(base)
    print("\ncoalescence points (detuning, partner loss):")
    for delta, kappa2 in locus:
        print(f"  delta = {delta / MHZ:+.6f} MHz, "
              f"kappa2 = {kappa2 / MHZ:.6f} MHz "
              f"(kappa1 + 4g = {(base.kappa1 + 4 * g) / MHZ:.6f} MHz)")

    fm = FluxMap(phi_grid=tuple(np.linspace(0.0, 0.49, 8)),
                 omega2_max=2.0 * math.pi * 7.4e9)
    probe = 2.0 * math.pi * np.linspace(5.18e9, 5.27e9, 41)
    amp = transmission_map(fm, base, probe)
    print("\n|S21| minimum along the probe, per flux point:")
    for phi, row in zip(fm.phi_grid, amp):
        i = int(np.argmin(row))
        print(f"  phi = {phi:5.3f} Phi_0: min |S21| = {row[i]:.4f} "
              f"at {probe[i] / (2.0 * math.pi * 1e9):.4f} GHz")


if __name__ == "__main__":
    main()
