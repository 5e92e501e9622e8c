#!/usr/bin/env python3
"""Fix the transport closed-form weighting constant against quadrature.

The depth-integrated covariance closed form carries a constant kappa
weighting the quadratic diffusion term.  This experiment compares the closed
form against direct numerical quadrature of the line-density integrand over a
detuning/rate grid and reports the worst relative deviation for candidate
kappa values; kappa = 1/2 is exact for the quadratic intensity expansion.
"""

import numpy as np

from spectrosens import fcs, oracles, propagation
from spectrosens.params import from_config


def closed_form_with_kappa(params, s_plus, d1, d2, z, kappa):
    der = params.derived
    rho = params.sample.density_rho_m
    att = np.exp(-rho * s_plus * z)
    return (der.n_p0 * att**2 * np.eye(2)
            + der.n_p0 * (d1 / s_plus) * (att - att**2)
            + att**2 * der.n_p0 * der.photon_flux_j0 * rho * d2 * z * kappa)


def main():
    grid = [(eps, rate) for eps in (0.0, 10.0, 40.0)
            for rate in (1e-5, 1e-3)]
    for kappa in (0.25, 0.5, 1.0):
        worst = 0.0
        for eps, rate in grid:
            params = from_config({"detuning_a_mhz": eps,
                                  "rate_a_mhz": rate, "rate_b_mhz": rate})
            exp = fcs.fit_diffusion_expansion(params)
            s1, s2 = fcs.cross_sections(params)
            s_plus = s1 + s2
            z = propagation.z_optimal(params, s_plus)
            closed = closed_form_with_kappa(params, s_plus, exp.D1, exp.D2,
                                            z, kappa)
            quad = oracles.quadrature_covariance(
                params, lambda j: exp.D1 * j + 0.5 * exp.D2 * j * j,
                s_plus, z)
            worst = max(worst,
                        np.max(np.abs(closed - quad)) / np.max(np.abs(quad)))
        print(f"kappa = {kappa:5.2f}: worst relative deviation {worst:.3e}")


if __name__ == "__main__":
    main()
