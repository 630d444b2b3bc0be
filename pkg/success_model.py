"""
Success Probability Model
=========================
Closed-form performance of a phase schedule:

- success_probability: P_L(lambda') = 1 - delta^2 T_L^2[T_{1/L}(1/delta) sqrt(1 - lambda')]
- reduced_propagator:  the same dynamics as a product of 2x2 matrices on
                       span{|alpha>, |beta>} (independent route to P_L)
- grover_iterations:   l_G for the standard algorithm
- statistical_fidelity between two outcome distributions
"""

import math
import logging
from dataclasses import dataclass

import numpy as np

from ampm_errors import ValidationError
from ampm_schedule import check_fraction, ceil_with_ties, chebyshev_T

logger = logging.getLogger(__name__)

# Round-off band absorbed by clamping P_L into [0, 1]
CLAMP_TOLERANCE = 1e-12

# Normalization tolerance for distributions read from states or files
NORMALIZATION_TOLERANCE = 1e-6


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True)
class Distribution:
    """Probability vector over basis-state indices."""
    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)

        if not probs:
            raise ValidationError("distribution is empty")
        if any(not math.isfinite(p) or p < 0.0 for p in probs):
            raise ValidationError("probabilities must be finite and non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValidationError(f"probabilities sum to {total}, expected 1")

    @classmethod
    def from_probs(cls, values, tol=NORMALIZATION_TOLERANCE):
        """Validate against tol, then renormalize exactly."""
        probs = [float(p) for p in values]
        if not probs:
            raise ValidationError("distribution is empty")
        if any(not math.isfinite(p) or p < 0.0 for p in probs):
            raise ValidationError("probabilities must be finite and non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > tol:
            raise ValidationError(f"probabilities sum to {total}, expected 1 (tolerance {tol})")
        return cls(tuple(p / total for p in probs))

    @classmethod
    def from_counts(cls, counts):
        total = sum(counts)
        if total <= 0:
            raise ValidationError("counts must contain at least one shot")
        return cls(tuple(c / total for c in counts))

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True)
class SuccessCurve:
    """P_L sampled over actual target fractions."""
    schedule: object
    samples: tuple


# =============================================================================
# SUCCESS PROBABILITY
# =============================================================================

def _check_actual(lambda_actual):
    values = np.asarray(lambda_actual, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values < 0.0) or np.any(values > 1.0):
        raise ValidationError(f"actual lambda must lie in [0, 1], got {lambda_actual}")
    return values


def _scaled_chebyshev(schedule, values):
    """
    delta * T_L(x) with x = T_{1/L}(1/delta) sqrt(1 - lambda') = sqrt(1 - lambda') / gamma.

    Above x = 1 the product is the ratio cosh(L b) / cosh(L a), a = arccosh(1/gamma),
    b = arccosh(x) <= a, taken in exponential form so neither factor overflows.
    """
    L = schedule.L
    inverse_gamma = 1.0 / schedule.gamma
    x = np.sqrt(1.0 - np.atleast_1d(values)) * inverse_gamma
    out = np.empty_like(x)

    inside = x <= 1.0
    out[inside] = schedule.delta * chebyshev_T(L, x[inside])

    a = math.acosh(inverse_gamma)
    b = np.arccosh(x[~inside])
    out[~inside] = np.exp(L * (b - a)) * (1.0 + np.exp(-2.0 * L * b)) / (1.0 + math.exp(-2.0 * L * a))

    # lambda' = 0: T_L(T_{1/L}(1/delta)) = 1/delta, so the product is exactly 1
    out[x == inverse_gamma] = 1.0
    return out


def success_probability_raw(schedule, lambda_actual):
    """Unclamped P_L; may leave [0, 1] by round-off."""
    values = _check_actual(lambda_actual)
    raw = 1.0 - np.square(_scaled_chebyshev(schedule, values))
    return float(raw[0]) if np.ndim(values) == 0 else raw.reshape(values.shape)


def success_probability(schedule, lambda_actual):
    """
    Success probability of the schedule when the actual target fraction is
    lambda_actual (scalar or array).
    """
    raw = success_probability_raw(schedule, lambda_actual)
    clipped = np.clip(raw, 0.0, 1.0)

    overshoot = np.max(np.abs(np.asarray(raw) - clipped))
    if overshoot > CLAMP_TOLERANCE:
        logger.warning("P_L left [0, 1] by %.3g (l=%d)", overshoot, schedule.l)

    return float(clipped) if np.ndim(clipped) == 0 else clipped


def success_curve(schedule, lambdas):
    """Evaluate P_L over a grid of actual fractions."""
    grid = np.asarray(lambdas, dtype=float)
    probs = np.atleast_1d(success_probability(schedule, grid))
    return SuccessCurve(
        schedule=schedule,
        samples=tuple((float(lam), float(p)) for lam, p in zip(np.atleast_1d(grid), probs)),
    )


# =============================================================================
# STANDARD GROVER REFERENCE
# =============================================================================

def grover_iterations(lam):
    """l_G = ceil(pi / (4 arcsin sqrt(lambda))) - 1."""
    check_fraction(lam)
    return ceil_with_ties(math.pi / (4.0 * math.asin(math.sqrt(lam)))) - 1


def grover_success_probability(l, lam):
    """sin^2((2l + 1) theta) with sin(theta) = sqrt(lambda)."""
    if l < 0:
        raise ValidationError(f"l must be non-negative, got {l}")
    check_fraction(lam)
    return math.sin((2 * l + 1) * math.asin(math.sqrt(lam))) ** 2


# =============================================================================
# REDUCED TWO-DIMENSIONAL DYNAMICS
# =============================================================================

def reduced_propagator_phases(phis, varphis, lambda_actual):
    """
    Evolve (sqrt(lambda'), sqrt(1 - lambda')) through G(phi_j, varphi_j),
    j ascending, restricted to the basis {|alpha>, |beta>}.

    G = -(I - (1 - e^{i phi}) |psi><psi|) S_f^varphi, S_f^varphi = diag(e^{i varphi}, 1)

    Returns:
        (a_target, a_nontarget) complex amplitudes
    """
    if len(phis) != len(varphis):
        raise ValidationError("phase lists must have equal length")
    lam = float(_check_actual(lambda_actual))

    psi = np.array([math.sqrt(lam), math.sqrt(1.0 - lam)], dtype=complex)
    projector = np.outer(psi, psi.conj())
    identity = np.eye(2, dtype=complex)

    state = psi.copy()
    for phi, varphi in zip(phis, varphis):
        oracle = np.diag([np.exp(1j * varphi), 1.0])
        diffusion = identity - (1.0 - np.exp(1j * phi)) * projector
        state = -(diffusion @ (oracle @ state))

    return complex(state[0]), complex(state[1])


def reduced_propagator(schedule, lambda_actual):
    return reduced_propagator_phases(schedule.phi, schedule.varphi, lambda_actual)


# =============================================================================
# FIDELITY
# =============================================================================

def _as_distribution(values):
    return values if isinstance(values, Distribution) else Distribution(tuple(values))


def statistical_fidelity(p_th, p_exp):
    """
    F = sum_j sqrt(p_exp_j * p_th_j).

    Raises:
        ValidationError: length mismatch or non-normalized input
    """
    th = _as_distribution(p_th)
    exp = _as_distribution(p_exp)
    if len(th) != len(exp):
        raise ValidationError(f"distribution lengths differ: {len(th)} vs {len(exp)}")

    fidelity = math.fsum(math.sqrt(a * b) for a, b in zip(th.probs, exp.probs))
    return min(1.0, max(0.0, fidelity))
