"""
Worldlines, spin configurations and branch scenarios.

A worldline is a piecewise polynomial x(t) of degree at most 3 stored as a
scipy ``PPoly``; evaluation is exact for polynomial input. Velocities use the
right-limit convention at breakpoints.
"""
import enum
import hashlib
import itertools
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PPoly

from ..core.config import settings
from ..core.exceptions import ScenarioError
from .constants import CODATA2018, PhysicalConstants

# Minkowski metric, signature (-,+,+,+)
ETA = np.diag([-1.0, 1.0, 1.0, 1.0])

_CONTINUITY_RTOL = 1e-12
_MAX_DEGREE = 3


class Spin(str, enum.Enum):
    UP = "up"
    DOWN = "down"

    @property
    def label(self) -> str:
        return "u" if self is Spin.UP else "d"


class Interaction(str, enum.Enum):
    GRAVITY = "gravity"
    ELECTROMAGNETISM = "electromagnetism"


class Worldline:
    """
    Timelike trajectory of one particle branch.

    Args:
        breakpoints: strictly increasing coordinate times (s), length n+1
        coefficients: array (n, k, 3); row j holds the ascending-power
            coefficients of segment j in local time t - breakpoints[j]
        corners: times where the trajectory is not smooth; defaults to the
            interior breakpoints. Integrators split panels there.
    """

    def __init__(
        self,
        breakpoints: Sequence[float],
        coefficients,
        corners: Optional[Sequence[float]] = None,
    ):
        breaks = np.asarray(breakpoints, dtype=float)
        coef = np.asarray(coefficients, dtype=float)
        if breaks.ndim != 1 or breaks.size < 2:
            raise ScenarioError("a worldline needs at least two breakpoints", field="breakpoints")
        if np.any(np.diff(breaks) <= 0):
            raise ScenarioError("breakpoints must be strictly increasing", field="breakpoints")
        if coef.ndim == 2:
            coef = coef[:, np.newaxis, :]
        if coef.ndim != 3 or coef.shape[0] != breaks.size - 1 or coef.shape[2] != 3:
            raise ScenarioError(
                f"coefficients must have shape (segments, degree+1, 3), got {coef.shape}",
                field="coefficients",
            )
        if coef.shape[1] - 1 > _MAX_DEGREE:
            raise ScenarioError(f"segment degree must be <= {_MAX_DEGREE}", field="coefficients")

        # PPoly stores descending powers with shape (k, n, 3)
        self._ppoly = PPoly(np.ascontiguousarray(coef[:, ::-1, :].transpose(1, 0, 2)), breaks, extrapolate=False)
        self._vpoly = self._ppoly.derivative()
        self._breaks = breaks
        self._break_list = breaks.tolist()
        self._pos_coef = self._ppoly.c.transpose(1, 0, 2).copy()
        self._vel_coef = self._vpoly.c.transpose(1, 0, 2).copy()
        if corners is None:
            corners = breaks[1:-1]
        self._corners = tuple(float(t) for t in corners if breaks[0] < t < breaks[-1])
        self._check_continuity()

    @classmethod
    def from_ppoly(cls, ppoly: PPoly, corners: Optional[Sequence[float]] = None) -> "Worldline":
        coef = ppoly.c[::-1].transpose(1, 0, 2)
        return cls(ppoly.x, coef, corners=corners)

    @classmethod
    def static(cls, position: Sequence[float], t_start: float, t_end: float) -> "Worldline":
        return cls([t_start, t_end], np.asarray(position, dtype=float).reshape(1, 1, 3))

    @classmethod
    def from_waypoints(
        cls,
        times: Sequence[float],
        positions,
        velocities=None,
    ) -> "Worldline":
        """C1 piecewise cubic through positions; omitted velocities are zero."""
        times = np.asarray(times, dtype=float)
        positions = np.asarray(positions, dtype=float).reshape(-1, 3)
        if velocities is None:
            velocities = np.zeros_like(positions)
        velocities = np.asarray(velocities, dtype=float).reshape(-1, 3)
        if times.size < 2 or positions.shape[0] != times.size or velocities.shape[0] != times.size:
            raise ScenarioError("waypoints need matching times, positions and velocities", field="waypoints")
        if np.any(np.diff(times) <= 0):
            raise ScenarioError("waypoint times must be strictly increasing", field="waypoints")
        spline = CubicHermiteSpline(times, positions, velocities, axis=0, extrapolate=False)
        return cls.from_ppoly(spline)

    def _check_continuity(self) -> None:
        scale = max(float(np.max(np.abs(self._pos_coef[:, -1, :]))), float(np.ptp(self._pos_coef[:, -1, :])), 1e-300)
        for j in range(len(self._break_list) - 2):
            h = self._break_list[j + 1] - self._break_list[j]
            left = self._horner(self._pos_coef[j], h)
            right = self._pos_coef[j + 1, -1, :]
            if np.max(np.abs(left - right)) > _CONTINUITY_RTOL * scale:
                raise ScenarioError(
                    f"position discontinuous at t={self._break_list[j + 1]!r}",
                    field="segments",
                )

    @staticmethod
    def _horner(coef: np.ndarray, dt: float) -> np.ndarray:
        value = coef[0]
        for row in coef[1:]:
            value = value * dt + row
        return value

    def _segment(self, t: float) -> int:
        start, end = self._break_list[0], self._break_list[-1]
        if not (start <= t <= end):
            raise ScenarioError(f"time {t!r} outside worldline domain [{start!r}, {end!r}]", field="t")
        return min(bisect_right(self._break_list, t) - 1, len(self._break_list) - 2)

    @property
    def domain(self) -> Tuple[float, float]:
        return self._break_list[0], self._break_list[-1]

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(self._break_list)

    @property
    def corners(self) -> Tuple[float, ...]:
        return self._corners

    @property
    def ppoly(self) -> PPoly:
        return self._ppoly

    def position(self, t: float) -> np.ndarray:
        j = self._segment(t)
        return self._horner(self._pos_coef[j], t - self._break_list[j])

    def velocity(self, t: float) -> np.ndarray:
        j = self._segment(t)
        return self._horner(self._vel_coef[j], t - self._break_list[j])

    def left_velocity(self, t: float) -> np.ndarray:
        """Left-limit derivative; differs from velocity() only at breakpoints."""
        j = self._segment(t)
        if j > 0 and t == self._break_list[j]:
            j -= 1
        return self._horner(self._vel_coef[j], t - self._break_list[j])

    def kinematics(self, t: float, c: float) -> "Kinematics4":
        return Kinematics4.from_velocity(self.velocity(t), c)

    def max_speed(self, samples_per_segment: Optional[int] = None) -> float:
        """Largest |v| over a dense sample of every segment."""
        n = samples_per_segment or settings.SUBLUMINAL_SAMPLES
        peak = 0.0
        for j in range(len(self._break_list) - 1):
            local = np.linspace(0.0, self._break_list[j + 1] - self._break_list[j], n)
            coef = self._vel_coef[j]
            v = np.zeros((n, 3)) + coef[0]
            for row in coef[1:]:
                v = v * local[:, np.newaxis] + row
            peak = max(peak, float(np.max(np.linalg.norm(v, axis=1))))
        return peak

    def with_history(self, t_start: float) -> "Worldline":
        """Prepend a static segment at the initial position back to t_start."""
        first = self._break_list[0]
        if t_start >= first:
            return self
        k = self._pos_coef.shape[1]
        rest = np.zeros((1, k, 3))
        rest[0, -1, :] = self._pos_coef[0, -1, :]
        coef = np.concatenate([rest, self._pos_coef], axis=0)[:, ::-1, :]
        corners = (first,) + self._corners
        return Worldline([t_start] + self._break_list, coef, corners=corners)

    def with_future(self, t_end: float) -> "Worldline":
        """Append uniform motion at the final position and velocity up to t_end."""
        last = self._break_list[-1]
        if t_end <= last:
            return self
        k = self._pos_coef.shape[1]
        tail = np.zeros((1, k, 3))
        tail[0, -1, :] = self.position(last)
        if k > 1:
            tail[0, -2, :] = self.left_velocity(last)
        coef = np.concatenate([self._pos_coef, tail], axis=0)[:, ::-1, :]
        corners = self._corners + (last,)
        return Worldline(self._break_list + [t_end], coef, corners=corners)

    def coefficient_bytes(self) -> bytes:
        return self._breaks.tobytes() + self._pos_coef.tobytes()


@dataclass(frozen=True)
class Kinematics4:
    """Four-velocity-like vector v^mu = (c, v) and Lorentz factor."""

    v4: np.ndarray
    gamma: float

    @classmethod
    def from_velocity(cls, velocity, c: float) -> "Kinematics4":
        v = np.asarray(velocity, dtype=float)
        beta2 = float(v @ v) / (c * c)
        if beta2 >= 1.0:
            raise ScenarioError(f"superluminal velocity |v|/c={math.sqrt(beta2)!r}", field="velocity")
        return cls(np.concatenate(([c], v)), 1.0 / math.sqrt(1.0 - beta2))

    @classmethod
    def at_rest(cls, c: float) -> "Kinematics4":
        return cls.from_velocity(np.zeros(3), c)

    @property
    def tensor(self) -> np.ndarray:
        """V^{mu nu} = gamma v^mu v^nu."""
        return self.gamma * np.outer(self.v4, self.v4)


def minkowski_dot(x: np.ndarray, y: np.ndarray) -> float:
    return float(-x[0] * y[0] + x[1:] @ y[1:])


def v_bilinear_em(ka: Kinematics4, kb: Kinematics4) -> float:
    """eta_{mu nu} v_a^mu v_b^nu = -c^2 + v_a . v_b"""
    return minkowski_dot(ka.v4, kb.v4)


def trace_reversed(tensor: np.ndarray) -> np.ndarray:
    """Vbar^{mu nu} = V^{mu nu} - 1/2 eta^{mu nu} eta_{ab} V^{ab}"""
    trace = float(np.einsum("ab,ab->", ETA, tensor))
    return tensor - 0.5 * ETA * trace


def v_bilinear_gravity(ka: Kinematics4, kb: Kinematics4) -> float:
    """
    Componentwise contraction Vbar_a^{mu nu} V_{b mu nu}.

    Equals c^4/2 for two particles at rest; the pair (a,b)+(b,a) then sums
    to the c^4 of the slow-motion expansion.
    """
    lowered = ETA @ kb.tensor @ ETA
    return float(np.einsum("mn,mn->", trace_reversed(ka.tensor), lowered))


@dataclass(frozen=True)
class SpinConfiguration:
    spins: Tuple[Spin, ...]

    @classmethod
    def from_label(cls, label: str) -> "SpinConfiguration":
        mapping = {"u": Spin.UP, "d": Spin.DOWN}
        try:
            return cls(tuple(mapping[ch] for ch in label))
        except KeyError:
            raise ScenarioError(f"invalid spin label {label!r}", field="sigma")

    @classmethod
    def all(cls, n: int) -> List["SpinConfiguration"]:
        """All 2^n configurations, particle 0 most significant, up before down."""
        return [cls(spins) for spins in itertools.product((Spin.UP, Spin.DOWN), repeat=n)]

    @property
    def label(self) -> str:
        return "".join(s.label for s in self.spins)

    @property
    def index(self) -> int:
        value = 0
        for s in self.spins:
            value = 2 * value + (1 if s is Spin.DOWN else 0)
        return value

    def __len__(self) -> int:
        return len(self.spins)

    def __iter__(self) -> Iterator[Spin]:
        return iter(self.spins)


@dataclass(frozen=True)
class Particle:
    mass: float
    charge: float
    worldline_up: Worldline
    worldline_down: Worldline

    def worldline(self, spin: Spin) -> Worldline:
        return self.worldline_up if spin is Spin.UP else self.worldline_down

    def coupling(self, interaction: Interaction) -> float:
        return self.mass if interaction is Interaction.GRAVITY else self.charge


@dataclass(frozen=True)
class BranchScenario:
    particles: Tuple[Particle, ...]
    interaction: Interaction
    window: Tuple[float, float]
    constants: PhysicalConstants = field(default=CODATA2018)
    # per-particle integration windows; None means every particle uses window
    particle_windows: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(self.particles))
        object.__setattr__(self, "window", (float(self.window[0]), float(self.window[1])))
        if not self.particles:
            raise ScenarioError("at least one particle is required", field="particles")
        if not self.window[1] >= self.window[0]:
            raise ScenarioError(f"window end {self.window[1]!r} precedes start {self.window[0]!r}", field="window")
        if self.particle_windows is not None:
            windows = tuple((float(lo), float(hi)) for lo, hi in self.particle_windows)
            if len(windows) != len(self.particles):
                raise ScenarioError(
                    f"{len(windows)} particle windows for {len(self.particles)} particles", field="particle_windows"
                )
            for a, (lo, hi) in enumerate(windows):
                if not hi >= lo:
                    raise ScenarioError(f"window end {hi!r} precedes start {lo!r}", field=f"particle_windows[{a}]")
            object.__setattr__(self, "particle_windows", windows)
        for a, p in enumerate(self.particles):
            t_i, t_f = self.target_window(a)
            if self.interaction is Interaction.GRAVITY and not p.mass > 0:
                raise ScenarioError("gravity needs strictly positive masses", field=f"particles[{a}].mass")
            if self.interaction is Interaction.ELECTROMAGNETISM and p.charge == 0:
                raise ScenarioError("electromagnetism needs non-zero charges", field=f"particles[{a}].charge")
            for spin in Spin:
                w = p.worldline(spin)
                start, end = w.domain
                if start > t_i or end < t_f:
                    raise ScenarioError(
                        f"worldline domain [{start!r}, {end!r}] does not cover the window",
                        field=f"particles[{a}].worldline_{spin.value}",
                    )
                speed = w.max_speed()
                if speed >= self.constants.c:
                    raise ScenarioError(
                        f"worldline is not subluminal (peak |v|/c={speed / self.constants.c!r})",
                        field=f"particles[{a}].worldline_{spin.value}",
                    )

    @property
    def n_particles(self) -> int:
        return len(self.particles)

    def worldline(self, a: int, sigma: SpinConfiguration) -> Worldline:
        return self.particles[a].worldline(sigma.spins[a])

    def configurations(self) -> List[SpinConfiguration]:
        return SpinConfiguration.all(self.n_particles)

    def target_window(self, b: int) -> Tuple[float, float]:
        """Integration window of particle b's target-time integral."""
        if self.particle_windows is None:
            return self.window
        return self.particle_windows[b]

    @cached_property
    def length_scale(self) -> float:
        """Largest separation between any two branch positions at their window starts."""
        points = [
            p.worldline(s).position(self.target_window(a)[0]) for a, p in enumerate(self.particles) for s in Spin
        ]
        scale = 0.0
        for x, y in itertools.combinations(points, 2):
            scale = max(scale, float(np.linalg.norm(x - y)))
        if scale == 0.0:
            scale = max(float(np.max(np.abs(points[0]))), 1.0)
        return scale

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.interaction.value.encode())
        h.update(np.asarray(self.window, dtype=float).tobytes())
        if self.particle_windows is not None:
            h.update(np.asarray(self.particle_windows, dtype=float).tobytes())
        h.update(np.asarray(
            [self.constants.c, self.constants.G, self.constants.hbar, self.constants.k_e, self.constants.epsilon0]
        ).tobytes())
        for p in self.particles:
            h.update(np.asarray([p.mass, p.charge]).tobytes())
            h.update(p.worldline_up.coefficient_bytes())
            h.update(p.worldline_down.coefficient_bytes())
        return h.hexdigest()[:16]
