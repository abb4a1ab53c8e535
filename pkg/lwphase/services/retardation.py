"""
Retarded-time solver.

For a source worldline x_a(t') and a target event (t, x) the retarded time is
the root of g(t') = c (t - t') - |x - x_a(t')|. For subluminal sources g is
strictly decreasing, so a sign-change bracket plus Brent's method (bisection
safeguarding secant/inverse-quadratic steps) always converges to the unique
root.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ..core.config import settings
from ..core.exceptions import RetardationError
from ..core.logger import logger
from ..models.constants import SPEED_OF_LIGHT
from ..models.kinematics import BranchScenario, SpinConfiguration, Worldline

_NEWTON_POLISH_STEPS = 3
# ulps of slack in the residual floor
_RESOLUTION_ULPS = 16.0


@dataclass(frozen=True)
class RetardedPoint:
    t_ret: float
    d_vec: np.ndarray
    d: float
    denom: float
    residual: float
    v_ret: np.ndarray
    bound: float


def _norm(v: np.ndarray) -> float:
    return float(np.sqrt(v @ v))


def _bracket_backward(g, t: float, start: float, first_step: float, max_expansions: int):
    """Walk back from t until g changes sign; returns (t_lo, t_hi) with g(t_lo) > 0 >= g(t_hi)."""
    t_hi = t
    step = first_step
    for _ in range(max_expansions):
        t_lo = max(t - step, start)
        if g(t_lo) > 0:
            return t_lo, t_hi
        if t_lo == start:
            break
        t_hi = t_lo
        step *= 2.0
    raise RetardationError(
        f"retarded time for t={t!r} lies before the source worldline start {start!r}; "
        "extend the static history"
    )


def resolution_floor(t: float, t_ret: float, target: np.ndarray, x_ret: np.ndarray, c: float) -> float:
    """
    Smallest residual double precision can resolve near the event: a few ulps
    of c t and of the positions entering |x - x_a(t_ret)|.
    """
    scale = c * max(abs(t), abs(t_ret)) + _norm(target) + _norm(x_ret)
    return _RESOLUTION_ULPS * float(np.finfo(float).eps) * scale


def retarded_time(
    source: Worldline,
    target_pos,
    t: float,
    tol: float,
    c: float = SPEED_OF_LIGHT,
) -> RetardedPoint:
    """
    Solve c (t - t_ret) = |target_pos - x_source(t_ret)| for t_ret < t.

    Args:
        source: worldline of the emitting particle
        target_pos: field point (m)
        t: coordinate time of the field point (s)
        tol: residual bound |c (t - t_ret) - d| in metres, raised to
            resolution_floor when double precision cannot reach it
        c: speed of light

    Returns:
        RetardedPoint with displacement, denominator d - d.v/c, residual and
        the bound it was held to

    Raises:
        RetardationError: root outside the worldline domain, coincident
            events or non-convergence
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    target = np.asarray(target_pos, dtype=float)
    start, end = source.domain
    if t > end:
        raise RetardationError(f"field time {t!r} is after the source worldline end {end!r}")

    def g(tp: float) -> float:
        return c * (t - tp) - _norm(target - source.position(tp))

    separation = -g(t) if t >= start else 0.0
    if t < start or separation <= 0.0:
        raise RetardationError(f"field point coincides with the source at t={t!r} or precedes its worldline")

    t_lo, t_hi = _bracket_backward(g, t, start, separation / c, settings.BRACKET_MAX_EXPANSIONS)
    try:
        t_ret = brentq(g, t_lo, t_hi, xtol=tol / (2.0 * c), maxiter=settings.RETARDATION_MAX_ITER)
    except (RuntimeError, ValueError) as e:
        raise RetardationError(f"retarded time did not converge at t={t!r}: {e}") from e

    x_ret = source.position(t_ret)
    v_ret = source.velocity(t_ret)
    d_vec = target - x_ret
    d = _norm(d_vec)
    residual = abs(c * (t - t_ret) - d)
    bound = max(tol, resolution_floor(t, t_ret, target, x_ret, c))
    for _ in range(_NEWTON_POLISH_STEPS):
        if residual <= bound:
            break
        slope = -c + float(d_vec @ v_ret) / d
        t_ret = min(max(t_ret - (c * (t - t_ret) - d) / slope, t_lo), t_hi)
        x_ret = source.position(t_ret)
        v_ret = source.velocity(t_ret)
        d_vec = target - x_ret
        d = _norm(d_vec)
        residual = abs(c * (t - t_ret) - d)
    if residual > bound:
        raise RetardationError(f"retarded-time residual {residual!r} m exceeds tolerance {bound!r} m at t={t!r}")

    denom = d - float(d_vec @ v_ret) / c
    return RetardedPoint(
        t_ret=t_ret, d_vec=d_vec, d=d, denom=denom, residual=residual, v_ret=v_ret, bound=bound
    )


def default_tolerance(scenario: BranchScenario) -> float:
    """
    Requested residual tolerance in metres: a fixed fraction of the scenario
    length scale. retarded_time floors it at double-precision resolution.
    """
    return settings.RETARDATION_RELATIVE_TOL * scenario.length_scale


def pair_retardation(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    a: int,
    b: int,
    t: float,
    tol: Optional[float] = None,
) -> RetardedPoint:
    """Particle a's branch (per sigma) as source, particle b's position at t as target."""
    if a == b:
        raise ValueError("pair_retardation needs two distinct particles")
    target = scenario.worldline(b, sigma).position(t)
    return retarded_time(
        scenario.worldline(a, sigma),
        target,
        t,
        tol if tol is not None else default_tolerance(scenario),
        scenario.constants.c,
    )


def lightcone_arrival(
    target: Worldline,
    t_emit: float,
    x_emit,
    tol: float,
    c: float = SPEED_OF_LIGHT,
) -> Optional[float]:
    """
    First time the future lightcone of (t_emit, x_emit) reaches the target
    worldline, or None if that happens after the target's domain ends.

    These are the times at which a source breakpoint shows up in the
    retarded integrand.
    """
    x0 = np.asarray(x_emit, dtype=float)
    start, end = target.domain
    t0 = max(t_emit, start)

    def h(t: float) -> float:
        return c * (t - t_emit) - _norm(target.position(t) - x0)

    if h(t0) >= 0.0:
        return t0
    t_lo = t0
    step = -h(t0) / c
    for _ in range(settings.BRACKET_MAX_EXPANSIONS):
        t_hi = min(t_lo + step, end)
        if h(t_hi) > 0:
            break
        if t_hi == end:
            return None
        t_lo = t_hi
        step *= 2.0
    else:
        logger.warning(f"lightcone from t={t_emit!r} never reached the target worldline")
        return None
    return brentq(h, t_lo, t_hi, xtol=tol / (2.0 * c), maxiter=settings.RETARDATION_MAX_ITER)
