"""
Common Lorentz boosts of branch scenarios.

Boosted polynomial worldlines are not polynomial in the new coordinate time,
so each segment is resampled and refitted with a C1 cubic Hermite spline.
The images of the original breakpoints stay marked as corners.
"""
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ..core.config import settings
from ..core.exceptions import ScenarioError
from .kinematics import BranchScenario, Particle, Spin, Worldline

_SIMULTANEITY_RTOL = 1e-9


class LorentzBoost:
    """Boost with velocity beta * c (beta is a 3-vector, |beta| < 1)."""

    def __init__(self, beta: Sequence[float], c: float):
        self.beta = np.asarray(beta, dtype=float).reshape(3)
        self.c = c
        speed = float(np.linalg.norm(self.beta))
        if speed >= 1.0:
            raise ScenarioError(f"boost speed must be below c, got |beta|={speed!r}", field="beta")
        self.gamma = 1.0 / math.sqrt(1.0 - speed * speed)
        self.direction = self.beta / speed if speed > 0 else np.zeros(3)

    def event(self, t: float, x: np.ndarray) -> Tuple[float, np.ndarray]:
        g, n = self.gamma, self.direction
        t_new = g * (t - float(self.beta @ x) / self.c)
        x_new = x + (g - 1.0) * float(x @ n) * n - g * self.beta * self.c * t
        return t_new, x_new

    def velocity(self, v: np.ndarray) -> np.ndarray:
        g, n = self.gamma, self.direction
        dt_new = g * (1.0 - float(self.beta @ v) / self.c)
        dx_new = v + (g - 1.0) * float(v @ n) * n - g * self.beta * self.c
        return dx_new / dt_new


def boost_worldline(
    worldline: Worldline,
    boost: LorentzBoost,
    nodes_per_segment: Optional[int] = None,
) -> Worldline:
    nodes = nodes_per_segment or settings.BOOST_NODES_PER_SEGMENT
    breaks = worldline.breakpoints
    times, positions, velocities = [], [], []
    for j in range(len(breaks) - 1):
        local = np.linspace(breaks[j], breaks[j + 1], nodes + 1)
        if j > 0:
            local = local[1:]
        for t in local:
            t = float(t)
            x = worldline.position(t)
            # shared nodes take the velocity of the segment that ends there
            v = worldline.left_velocity(t) if t > breaks[j] else worldline.velocity(t)
            t_new, x_new = boost.event(t, x)
            times.append(t_new)
            positions.append(x_new)
            velocities.append(boost.velocity(v))
    spline = CubicHermiteSpline(np.asarray(times), np.asarray(positions), np.asarray(velocities), axis=0)
    corners = [boost.event(t, worldline.position(t))[0] for t in worldline.corners]
    return Worldline.from_ppoly(spline, corners=corners)


def _future_extension(scenario: BranchScenario, speed: float) -> float:
    """Forward time to append so every boosted domain outlasts every boosted window."""
    t_i, t_f = scenario.window
    points = [p.worldline(s).position(t_f) for p in scenario.particles for s in Spin]
    reach = max((float(np.linalg.norm(x - y)) for x in points for y in points), default=0.0)
    return 2.0 * reach / (scenario.constants.c * (1.0 - speed)) + 0.1 * (t_f - t_i)


def boost_scenario(
    scenario: BranchScenario,
    beta: Sequence[float],
    nodes_per_segment: Optional[int] = None,
) -> BranchScenario:
    """
    Apply one boost to every branch worldline and to the window endpoints.

    Each particle integrates between the images of its own endpoint events.
    When those images are simultaneous across particles (boost perpendicular
    to the separations at the window ends) the scenario keeps a single
    window; otherwise it carries per-particle windows. Worldlines are first
    continued at constant velocity past the window end so that field times
    up to the latest boosted window end stay inside every source domain.

    Raises:
        ScenarioError: if the two branches of one particle end up with
            non-simultaneous endpoint events (branches apart at a window end
            along the boost).
    """
    boost = LorentzBoost(beta, scenario.constants.c)
    t_i, t_f = scenario.window
    span = max(abs(t_f - t_i), 1e-300)
    extension = _future_extension(scenario, float(np.linalg.norm(boost.beta)))
    windows, particles = [], []
    for a, p in enumerate(scenario.particles):
        starts, ends, boosted = [], [], {}
        for spin in Spin:
            w = p.worldline(spin)
            starts.append(boost.event(t_i, w.position(t_i))[0])
            ends.append(boost.event(t_f, w.position(t_f))[0])
            boosted[spin] = boost_worldline(w.with_future(t_f + extension), boost, nodes_per_segment)
        if max(starts) - min(starts) > _SIMULTANEITY_RTOL * span or max(ends) - min(ends) > _SIMULTANEITY_RTOL * span:
            raise ScenarioError(
                f"branches of particle {a} are apart at a window end along the boost; "
                "their endpoint events are not simultaneous after it",
                field="beta",
            )
        windows.append((max(starts), min(ends)))
        particles.append(Particle(p.mass, p.charge, boosted[Spin.UP], boosted[Spin.DOWN]))

    starts = [lo for lo, _ in windows]
    ends = [hi for _, hi in windows]
    if max(starts) - min(starts) <= _SIMULTANEITY_RTOL * span and max(ends) - min(ends) <= _SIMULTANEITY_RTOL * span:
        # innermost images keep the window inside every boosted domain
        window = (max(starts), min(ends))
        return BranchScenario(tuple(particles), scenario.interaction, window, scenario.constants)
    return BranchScenario(
        tuple(particles),
        scenario.interaction,
        (min(starts), max(ends)),
        scenario.constants,
        particle_windows=tuple(windows),
    )
