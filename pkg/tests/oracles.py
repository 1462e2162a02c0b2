"""Independent reference implementations used as test oracles.

Everything here deliberately avoids the library's vectorized code paths:
coefficients come from adaptive numerical integration, array factors from
plain-Python loops or arbitrary-precision mpmath sums, and statistics from
closed forms in scipy.  Tests compare the package against these.
"""

import cmath
import math

import mpmath
import numpy as np
from scipy.integrate import quad
from scipy.stats import norm


def staircase_fourier_quad(values, nu, epsabs=1e-12):
    """Fourier coefficient of a staircase waveform by adaptive quadrature.

    ``values`` holds the L per-slot complex values over one normalized period;
    returns integral of v(tau) * exp(-2j*pi*nu*tau) over tau in [0, 1].
    """
    vals = [complex(v) for v in values]
    L = len(vals)

    def f(tau, part):
        u = min(int(tau * L), L - 1)
        z = vals[u] * cmath.exp(-2j * math.pi * nu * tau)
        return z.real if part == 0 else z.imag

    pts = [u / L for u in range(L + 1)]
    re = quad(f, 0.0, 1.0, args=(0,), points=pts, limit=200, epsabs=epsabs)[0]
    im = quad(f, 0.0, 1.0, args=(1,), points=pts, limit=200, epsabs=epsabs)[0]
    return complex(re, im)


def cumulative_phase_direct(row, phase0_deg, phase1_deg):
    """Running feed phasors of one codeword by explicit scalar products."""
    out = []
    acc = complex(1.0)
    for s in row:
        k = phase1_deg if s == 1 else phase0_deg
        acc *= cmath.exp(1j * math.radians(k))
        out.append(acc)
    return out


def array_factor_1d_direct(row, theta_deg, phase0_deg, phase1_deg,
                           cell_period, carrier_freq, leakage=0.0):
    """1D array factor by plain-Python summation."""
    k0 = 2.0 * math.pi * carrier_freq / 299792458.0
    gamma = cumulative_phase_direct(row, phase0_deg, phase1_deg)
    total = complex(0.0)
    for i, g in enumerate(gamma):
        taper = math.exp(-leakage * cell_period * i)
        total += g * taper * cmath.exp(
            1j * k0 * cell_period * i * math.cos(math.radians(theta_deg)))
    return total


def array_factor_2d_mp(slab, theta_deg, phi_deg, phase0_deg, phase1_deg,
                       cell_period, spacing, carrier_freq, leakage=0.0,
                       shifter=None, dps=40):
    """2D array factor summed in arbitrary-precision arithmetic."""
    with mpmath.workdps(dps):
        k0 = 2 * mpmath.pi * carrier_freq / mpmath.mpf(299792458)
        th = mpmath.radians(theta_deg)
        ph = mpmath.radians(phi_deg)
        cell = k0 * cell_period * mpmath.sin(th) * mpmath.sin(ph)
        branch = k0 * spacing * mpmath.sin(th) * mpmath.cos(ph)
        total = mpmath.mpc(0)
        for m, row in enumerate(slab):
            lam = mpmath.mpc(1) if shifter is None else mpmath.mpc(complex(shifter[m]))
            acc = mpmath.mpf(0)
            inner = mpmath.mpc(0)
            for n, s in enumerate(row):
                kappa = phase1_deg if s == 1 else phase0_deg
                acc += mpmath.radians(kappa)
                taper = mpmath.e ** (-mpmath.mpf(leakage) * cell_period * n)
                inner += taper * mpmath.exp(1j * (acc + cell * n))
            total += lam * mpmath.exp(1j * branch * m) * inner
        return complex(total)


def qfunc(x):
    """Gaussian tail Q(x) through scipy's survival function."""
    return norm.sf(x)


def evm_squared_direct(rows, theta_deg, config):
    """Noiseless error-vector power ratio from per-step power moments.

    Parseval over one modulation period gives sum_nu |W(nu)|^2 =
    mean_u |Xi_u|^2, and the fundamental is W(0) = mean_u Xi_u, so the
    interference-to-signal ratio is a variance-over-mean-power expression in
    the per-step factors alone.  Step factors come from the plain loop above.
    """
    xi = [array_factor_1d_direct(r, theta_deg, config.phase0_deg,
                                 config.phase1_deg, config.cell_period,
                                 config.carrier_freq, config.leakage)
          for r in rows]
    w0 = sum(xi) / len(xi)
    mean_pow = sum(abs(z) ** 2 for z in xi) / len(xi)
    return (mean_pow - abs(w0) ** 2) / abs(w0) ** 2
