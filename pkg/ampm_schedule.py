"""
AMPM Phase Schedules
====================
Computes the parameters of the exact matched-multiphase search for a known
target fraction lambda:

    l_min  ->  delta  ->  gamma  ->  phases {phi_j}, {varphi_j}

plus the single-phase-matching reference phase and the check that one of
the multiphase phases coincides with it in absolute value.

Conventions:
- T_L(x) is the Chebyshev polynomial of the first kind, evaluated with
  cos/arccos inside [-1, 1] and cosh/arccosh outside.
- T_{1/L}(x) = cosh(arccosh(x) / L) for x >= 1.
- delta = 1 / T_L(cos(pi/(2L)) / sqrt(1 - lambda)),  gamma = 1 / T_{1/L}(1/delta)
  = sqrt(1 - lambda) / cos(pi/(2L)).
- arccot(y) = arctan(1/y), arccot(0) = pi/2.
- All phases are reported in (-pi, pi].
"""

import math
import logging
from dataclasses import dataclass

import numpy as np

from ampm_errors import CapabilityError, ValidationError

logger = logging.getLogger(__name__)

# Distance from an integer (l_min, l_G) or from 1 (Chebyshev argument) that
# is treated as exactly on the boundary.
TIE_TOLERANCE = 1e-12

# Tolerance of the coincidence sign rule
COINCIDENCE_TOLERANCE = 1e-10


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True)
class PhaseSchedule:
    """
    Matched-multiphase schedule for l generalized Grover iterations.

    phi[j-1] is the S_0 phase and varphi[j-1] the S_f phase of iteration j.
    """
    l: int
    L: int
    delta: float
    gamma: float
    phi: tuple
    varphi: tuple
    design_lambda: float

    def __post_init__(self):
        if self.l < 0 or self.L != 2 * self.l + 1:
            raise ValidationError(f"inconsistent iteration counts l={self.l}, L={self.L}")
        if len(self.phi) != self.l or len(self.varphi) != self.l:
            raise ValidationError(f"expected {self.l} phases per list, got {len(self.phi)} and {len(self.varphi)}")
        if not 0.0 < self.delta <= 1.0:
            raise ValidationError(f"delta must lie in (0, 1], got {self.delta}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValidationError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not 0.0 < self.design_lambda <= 1.0:
            raise ValidationError(f"design lambda must lie in (0, 1], got {self.design_lambda}")
        if tuple(self.varphi) != tuple(reversed(self.phi)):
            raise ValidationError("varphi must be phi in reverse order")

    @classmethod
    def empty(cls, lam=1.0):
        """Zero-iteration schedule: measure immediately (lambda = 1)."""
        return cls(l=0, L=1, delta=1.0, gamma=1.0, phi=(), varphi=(), design_lambda=float(lam))

    def swapped(self):
        """Same schedule with the S_0 and S_f phase lists exchanged."""
        return PhaseSchedule(
            l=self.l, L=self.L, delta=self.delta, gamma=self.gamma,
            phi=tuple(self.varphi), varphi=tuple(self.phi),
            design_lambda=self.design_lambda,
        )

    @property
    def is_empty(self):
        return self.l == 0

    def to_dict(self):
        return {
            "l": self.l,
            "L": self.L,
            "design_lambda": self.design_lambda,
            "delta": self.delta,
            "gamma": self.gamma,
            "phi": list(self.phi),
            "varphi": list(self.varphi),
        }


@dataclass(frozen=True)
class CoincidenceReport:
    l: int
    m: int
    phi_m: float
    phi_s_abs: float
    sign_rule_holds: bool


# =============================================================================
# CHEBYSHEV POLYNOMIALS
# =============================================================================

def chebyshev_T(L, x):
    """
    Chebyshev polynomial of the first kind T_L(x) for any real x.

    Args:
        L: Non-negative integer degree
        x: Scalar or array

    Returns:
        float for scalar input, numpy array otherwise
    """
    values = np.asarray(x, dtype=float)
    flat = np.atleast_1d(values)
    out = np.empty_like(flat)

    inside = np.abs(flat) <= 1.0
    above = flat > 1.0
    below = flat < -1.0

    out[inside] = np.cos(L * np.arccos(flat[inside]))
    out[above] = np.cosh(L * np.arccosh(flat[above]))
    out[below] = (-1.0) ** L * np.cosh(L * np.arccosh(-flat[below]))

    if values.ndim == 0:
        return float(out[0])
    return out.reshape(values.shape)


# =============================================================================
# ITERATION COUNTS
# =============================================================================

def check_fraction(lam, allow_one=True):
    if isinstance(lam, bool) or not isinstance(lam, (int, float)):
        raise ValidationError(f"lambda must be a real number, got {lam!r}")
    upper_ok = lam <= 1.0 if allow_one else lam < 1.0
    if not (lam > 0.0 and upper_ok):
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise ValidationError(f"lambda must lie in {bound}, got {lam}")


def ceil_with_ties(x):
    nearest = round(x)
    if abs(x - nearest) <= TIE_TOLERANCE:
        return int(nearest)
    return math.ceil(x)


def l_min(lam):
    """Smallest iteration count admitting an exact AMPM schedule."""
    check_fraction(lam)
    return ceil_with_ties(math.pi / (4.0 * math.asin(math.sqrt(lam))) - 0.5)


def _check_iterations(l, lam):
    if isinstance(l, bool) or not isinstance(l, (int, np.integer)) or l < 1:
        raise ValidationError(f"l must be a positive integer, got {l!r}")
    check_fraction(lam, allow_one=False)
    minimum = l_min(lam)
    if l < minimum:
        raise ValidationError(f"l={l} is below l_min={minimum} for lambda={lam}")


# =============================================================================
# AMPM PARAMETERS
# =============================================================================

def _chebyshev_argument(l, lam):
    """(L, cos(pi/(2L)) / sqrt(1 - lambda)) for a validated (l, lambda)."""
    _check_iterations(l, lam)
    L = 2 * l + 1
    argument = math.cos(math.pi / (2 * L)) / math.sqrt(1.0 - lam)

    # lambda = sin^2(pi/(2L)) lands on 1 up to round-off
    if argument - 1.0 <= TIE_TOLERANCE:
        argument = 1.0
    return L, argument


def _delta_from_argument(l, lam, L, argument):
    # 1 / cosh(L a) = 2 e^{-La} / (1 + e^{-2La}), a = arccosh(argument)
    decay = math.exp(-L * math.acosh(argument))
    delta = 2.0 * decay / (1.0 + decay * decay)
    if delta == 0.0:
        raise CapabilityError(f"delta underflows for l={l}, lambda={lam}")
    return min(delta, 1.0)


def delta_for(l, lam):
    """
    delta = 1 / T_L(cos(pi/(2L)) / sqrt(1 - lambda)) with L = 2l + 1.

    Evaluated as a decaying exponential, so deep schedules stay finite
    down to the subnormal range.

    Raises:
        ValidationError: l < l_min(lambda) or lambda outside (0, 1)
        CapabilityError: delta underflows double precision
    """
    L, argument = _chebyshev_argument(l, lam)
    return _delta_from_argument(l, lam, L, argument)


def gamma_for(delta, L):
    """gamma = 1 / T_{1/L}(1/delta)."""
    if not 0.0 < delta <= 1.0:
        raise ValidationError(f"delta must lie in (0, 1], got {delta}")
    # arccosh(1/delta) without forming 1/delta
    spread = math.log1p(math.sqrt(1.0 - delta * delta)) - math.log(delta)
    return 1.0 / math.cosh(spread / L)


def arccot(y):
    """Signed principal branch: values in (-pi/2, 0) U (0, pi/2]."""
    if y == 0.0:
        return math.pi / 2
    return math.atan(1.0 / y)


def wrap_phase(angle):
    """Map an angle into (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def build_schedule(l, lam):
    """
    Build the exact AMPM schedule for l iterations at target fraction lambda.

    Args:
        l: Iteration count, l >= l_min(lambda)
        lam: Target fraction in (0, 1)

    Returns:
        PhaseSchedule with phi_j = -2 arccot(sqrt(1 - gamma^2) tan(2 pi j / L))
        and varphi_j = phi_{l-j+1}
    """
    L, argument = _chebyshev_argument(l, lam)
    delta = _delta_from_argument(l, lam, L, argument)
    # 1 / T_{1/L}(1/delta) collapses to the inverse Chebyshev argument
    gamma = 1.0 / argument
    scale = math.sqrt(max(0.0, 1.0 - gamma * gamma))

    phi = []
    for j in range(1, l + 1):
        y = scale * math.tan(2.0 * math.pi * j / L)
        phi.append(wrap_phase(-2.0 * arccot(y)))

    logger.debug("schedule l=%d lambda=%.12g delta=%.6g gamma=%.6g", l, lam, delta, gamma)

    return PhaseSchedule(
        l=l, L=L, delta=delta, gamma=gamma,
        phi=tuple(phi), varphi=tuple(reversed(phi)),
        design_lambda=float(lam),
    )


def lambda_max_points(schedule):
    """Target fractions at which the schedule succeeds with probability 1."""
    L = schedule.L
    return [
        1.0 - schedule.gamma ** 2 * math.cos((2 * j - 1) * math.pi / (2 * L)) ** 2
        for j in range(1, schedule.l + 1)
    ]


def fixed_point_band(schedule):
    """
    Returns:
        (lambda_low, p_floor): success stays >= p_floor = 1 - delta^2 for
        every lambda >= lambda_low = 1 - gamma^2
    """
    return 1.0 - schedule.gamma ** 2, 1.0 - schedule.delta ** 2


# =============================================================================
# SINGLE-PHASE MATCHING
# =============================================================================

def phi_single(l, lam):
    """
    |phi_s| = arccos(1 - (1 - cos(pi/(2l+1))) / lambda), the phase of the
    exact single-phase-matching algorithm with l iterations. Both signs
    are valid; callers choose.
    """
    if isinstance(l, bool) or not isinstance(l, (int, np.integer)) or l < 1:
        raise ValidationError(f"l must be a positive integer, got {l!r}")
    check_fraction(lam, allow_one=False)

    argument = 1.0 - (1.0 - math.cos(math.pi / (2 * l + 1))) / lam
    if argument < -1.0 - TIE_TOLERANCE or argument > 1.0:
        raise ValidationError(
            f"no exact single-phase solution for l={l}, lambda={lam} (l_min={l_min(lam)})"
        )
    return math.acos(max(-1.0, argument))


def single_phase_sequence(l, lam, sign=1):
    """Phase lists (phi, varphi) of l repetitions of G(phi_s, phi_s)."""
    if sign not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {sign!r}")
    phase = sign * phi_single(l, lam)
    return [phase] * l, [phase] * l


def coincidence_index(l):
    return (l + 1) // 2 if l % 2 else l // 2


def coincidence_check(l, lam):
    """
    Compare the AMPM phase phi_m against the single-phase magnitude |phi_s|.

    The sign rule: phi_m = +|phi_s| for odd l, -|phi_s| for even l.
    """
    schedule = build_schedule(l, lam)
    m = coincidence_index(l)
    phi_m = schedule.phi[m - 1]
    phi_s_abs = phi_single(l, lam)

    expected = phi_s_abs if l % 2 else -phi_s_abs
    holds = abs(wrap_phase(phi_m - expected)) <= COINCIDENCE_TOLERANCE

    if not holds:
        logger.warning("coincidence failed: l=%d lambda=%.12g phi_m=%.12g |phi_s|=%.12g",
                       l, lam, phi_m, phi_s_abs)

    return CoincidenceReport(l=l, m=m, phi_m=phi_m, phi_s_abs=phi_s_abs, sign_rule_holds=holds)
