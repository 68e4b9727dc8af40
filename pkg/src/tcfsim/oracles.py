"""Closed-form beam results used as independent checks on the FEM path."""

import math

from .errors import BuckledError, DomainError

# Clamped-clamped flexural mode constants (beta_n * L).
LAMBDA1 = 4.73004074
LAMBDA2 = 7.8532


def cc_beam_frequency(L, w, t, E, rho, mode_constant=LAMBDA1):
    """Flexural frequency (Hz) of a clamped-clamped rectangular beam vibrating in the ``w`` direction."""
    for name, v in (("L", L), ("w", w), ("t", t), ("E", E), ("rho", rho)):
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")
    I = t * w**3 / 12.0
    A = w * t
    return mode_constant**2 / (2.0 * math.pi) * math.sqrt(E * I / (rho * A)) / L**2


def euler_critical_load(E, I, L):
    """Buckling load ``4 pi^2 E I / L^2`` of a clamped-clamped column."""
    return 4.0 * math.pi**2 * E * I / L**2


def axial_corrected_frequency(f0, N, L, E, I):
    """Single-mode estimate ``f0 sqrt(1 + N / N_cr)`` of a prestressed clamped beam."""
    n_cr = euler_critical_load(E, I, L)
    if N <= -n_cr:
        raise BuckledError(f"axial force {N:.4g} N is beyond buckling (N_cr = {n_cr:.4g} N)")
    return f0 * math.sqrt(1.0 + N / n_cr)


def constrained_bar_force(E, A, cte, dT):
    """Axial force in a bar whose thermal expansion is fully blocked (tension positive)."""
    return -E * A * cte * dT


def uncompensated_tcf(tce):
    """TCF in ppm/degC of a stress-free beam, where f scales with sqrt(E)."""
    return 0.5 * tce * 1e6


def series_mismatch_force(mismatch, *stiffnesses):
    """Force carried by springs in series closing a length ``mismatch``.

    Positive mismatch (the chain is too long) gives a compressive (negative)
    force.
    """
    return -mismatch / sum(1.0 / k for k in stiffnesses)
