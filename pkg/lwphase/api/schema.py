"""
Scenario file schema.

A scenario file is JSON with either explicit particles or a builder
shorthand:

    {"interaction": "gravity", "model": "exact", "tolerance": 1e-9,
     "builder": {"type": "bmv", "params": {"A": "1e-14 kg", "d": "200 um", ...}}}

    {"interaction": "gravity", "window": ["0 s", "1 s"],
     "particles": [{"mass": "1 kg", "up": {"static": ["0 m", 0, 0]}}, ...]}
"""
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.exceptions import ScenarioError
from ..core.logger import logger
from ..models.constants import CODATA2018, SPEED_OF_LIGHT, PhysicalConstants
from ..models.kinematics import BranchScenario, Interaction, Particle, Worldline
from ..services.action import ActionModel
from ..services.scenarios import BMVParams, electron_interferometer, scenario_for
from .units import Dimension, split_quantity, to_si

QuantityIn = Union[float, str, Dict[str, Any]]

PRESETS = {"electron": electron_interferometer}

_HISTORY_LIGHT_TIMES = 3.0
_HISTORY_WINDOW_FRACTION = 0.1


class ConstantsBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    c: Optional[QuantityIn] = Field(None, description="Speed of light (velocity units)")
    G: Optional[float] = Field(None, gt=0, description="Gravitational constant, SI")
    hbar: Optional[float] = Field(None, gt=0, description="Reduced Planck constant, SI")
    k_e: Optional[float] = Field(None, gt=0, description="Coulomb constant, SI")
    epsilon0: Optional[float] = Field(None, gt=0, description="Vacuum permittivity, SI")

    def build(self) -> PhysicalConstants:
        c = to_si(self.c, Dimension.VELOCITY, "constants.c", SPEED_OF_LIGHT) if self.c is not None else None
        return PhysicalConstants.with_overrides(c=c, G=self.G, hbar=self.hbar, k_e=self.k_e, epsilon0=self.epsilon0)


class WaypointsBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    times: List[QuantityIn] = Field(..., min_length=2, description="Strictly increasing node times")
    positions: List[List[QuantityIn]] = Field(..., description="One 3-vector per node")
    velocities: Optional[List[List[QuantityIn]]] = Field(None, description="One 3-vector per node; zero if omitted")


class SegmentsBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    breakpoints: List[QuantityIn] = Field(..., min_length=2)
    coefficients: List[List[List[float]]] = Field(
        ..., description="Per segment, ascending-power SI coefficients of (t - t_j), each a 3-vector"
    )


class BranchSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    static: Optional[List[QuantityIn]] = Field(None, description="Fixed position")
    waypoints: Optional[WaypointsBlock] = None
    segments: Optional[SegmentsBlock] = None

    @model_validator(mode="after")
    def _one_form(self):
        given = [name for name in ("static", "waypoints", "segments") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"give exactly one of static, waypoints, segments (got {given or 'none'})")
        return self

    def build(self, path: str, window, c: float) -> Worldline:
        if self.static is not None:
            return Worldline.static(_vector(self.static, Dimension.LENGTH, f"{path}.static", c), window[0], window[1])
        if self.waypoints is not None:
            wp = self.waypoints
            times = [to_si(t, Dimension.TIME, f"{path}.waypoints.times.{i}") for i, t in enumerate(wp.times)]
            positions = [
                _vector(p, Dimension.LENGTH, f"{path}.waypoints.positions.{i}", c) for i, p in enumerate(wp.positions)
            ]
            velocities = None
            if wp.velocities is not None:
                velocities = [
                    _vector(v, Dimension.VELOCITY, f"{path}.waypoints.velocities.{i}", c)
                    for i, v in enumerate(wp.velocities)
                ]
            return Worldline.from_waypoints(times, positions, velocities)
        else:
            seg = self.segments
            breaks = [to_si(t, Dimension.TIME, f"{path}.segments.breakpoints.{i}") for i, t in enumerate(seg.breakpoints)]
            try:
                coefficients = np.asarray(seg.coefficients, dtype=float)
            except ValueError:
                raise ScenarioError("segments must share one polynomial degree", field=f"{path}.segments.coefficients")
            return Worldline(breaks, coefficients)


class ParticleSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mass: Optional[QuantityIn] = None
    charge: Optional[QuantityIn] = None
    up: BranchSpec
    down: Optional[BranchSpec] = Field(None, description="Defaults to the up branch")


class BuilderSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["bmv", "spacelike", "preset"]
    name: Optional[str] = Field(None, description="Preset name, for type=preset")
    params: Dict[str, Any] = Field(default_factory=dict, description="BMVParams fields with units")

    @model_validator(mode="after")
    def _preset_name(self):
        if self.type == "preset" and self.name not in PRESETS:
            raise ValueError(f"preset name must be one of {sorted(PRESETS)}")
        return self


class ScenarioFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    constants: Optional[ConstantsBlock] = None
    interaction: Interaction = Interaction.GRAVITY
    particles: Optional[List[ParticleSpec]] = None
    builder: Optional[BuilderSpec] = None
    window: Optional[List[QuantityIn]] = Field(None, min_length=2, max_length=2)
    model: ActionModel = ActionModel.EXACT
    tolerance: Optional[float] = Field(None, gt=0, description="Quadrature tolerance in radians")

    @model_validator(mode="after")
    def _one_source(self):
        if (self.particles is None) == (self.builder is None):
            raise ValueError("give exactly one of particles or builder")
        if self.particles is not None and self.window is None:
            raise ValueError("explicit particles need a window")
        return self

    def build(self) -> "LoadedScenario":
        """Resolve units and construct the engine scenario."""
        constants = self.constants.build() if self.constants is not None else CODATA2018
        if self.builder is not None:
            params = bmv_params(self.builder, self.interaction, constants)
            builder = "bmv" if self.builder.type == "preset" else self.builder.type
            scenario = scenario_for(builder, params, constants)
        else:
            params = None
            scenario = self._explicit(constants)
        return LoadedScenario(scenario, self.model, self.tolerance, params)

    def _explicit(self, constants: PhysicalConstants) -> BranchScenario:
        c = constants.c
        window = tuple(to_si(t, Dimension.TIME, f"window.{i}") for i, t in enumerate(self.window))
        coupling = "mass" if self.interaction is Interaction.GRAVITY else "charge"

        branches = []
        for i, spec in enumerate(self.particles):
            if getattr(spec, coupling) is None:
                raise ScenarioError(f"required for {self.interaction.value}", field=f"particles.{i}.{coupling}")
            up = spec.up.build(f"particles.{i}.up", window, c)
            down = spec.down.build(f"particles.{i}.down", window, c) if spec.down is not None else up
            branches.append((up, down))

        # static history reaches back past every retarded time at the window start
        starts = [w.position(w.domain[0]) for pair in branches for w in pair]
        extent = max(float(np.linalg.norm(x - y)) for x in starts for y in starts)
        t_start = (
            min(w.domain[0] for pair in branches for w in pair)
            - _HISTORY_LIGHT_TIMES * extent / c
            - _HISTORY_WINDOW_FRACTION * (window[1] - window[0])
        )

        particles = []
        for i, (spec, (up, down)) in enumerate(zip(self.particles, branches)):
            mass = to_si(spec.mass, Dimension.MASS, f"particles.{i}.mass") if spec.mass is not None else 0.0
            charge = to_si(spec.charge, Dimension.CHARGE, f"particles.{i}.charge") if spec.charge is not None else 0.0
            particles.append(Particle(mass, charge, up.with_history(t_start), down.with_history(t_start)))
        return BranchScenario(tuple(particles), self.interaction, window, constants)


@dataclass(frozen=True)
class LoadedScenario:
    scenario: BranchScenario
    model: ActionModel
    tolerance: Optional[float]
    params: Optional[BMVParams] = None


def _vector(raw: List[Any], dimension: Dimension, field: str, c: float) -> np.ndarray:
    if len(raw) != 3:
        raise ScenarioError(f"expected 3 components, got {len(raw)}", field=field)
    return np.array([to_si(x, dimension, f"{field}.{k}", c) for k, x in enumerate(raw)])


_PARAM_DIMENSIONS = {
    "d": Dimension.LENGTH,
    "delta_x": Dimension.LENGTH,
    "T": Dimension.TIME,
    "t_hold": Dimension.TIME,
}


def bmv_params(builder: BuilderSpec, interaction: Interaction, constants: PhysicalConstants) -> BMVParams:
    """BMVParams from builder params (with units); preset values are the base."""
    values: Dict[str, Any] = {}
    if builder.type == "preset":
        base = PRESETS[builder.name]()
        values = {name: getattr(base, name) for name in base.__dataclass_fields__}
        interaction = base.interaction
    values["interaction"] = interaction
    coupling_dim = Dimension.MASS if interaction is Interaction.GRAVITY else Dimension.CHARGE
    for key, raw in builder.params.items():
        field = f"builder.params.{key}"
        if key == "A":
            values["A"] = to_si(raw, coupling_dim, field, constants.c)
        elif key in _PARAM_DIMENSIONS:
            values[key] = to_si(raw, _PARAM_DIMENSIONS[key], field, constants.c)
        elif key == "ramp_fraction":
            value, unit = split_quantity(raw, field)
            if unit:
                raise ScenarioError("ramp_fraction is dimensionless", field=field)
            values[key] = value
        elif key == "geometry":
            values[key] = raw
        else:
            raise ScenarioError("unknown builder parameter", field=field)
    missing = [k for k in ("A", "d", "delta_x", "T") if k not in values]
    if missing:
        raise ScenarioError(f"missing {missing}", field="builder.params")
    try:
        return BMVParams(**values)
    except ScenarioError as e:
        raise ScenarioError(e.message, field=f"builder.params.{e.field}") from e
    except ValueError as e:
        raise ScenarioError(str(e), field="builder.params.geometry") from e


def read_scenario_json(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ScenarioError(f"no such file {str(path)!r}", field="file")
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e}", field="file")
    if not isinstance(data, dict):
        raise ScenarioError("top level must be an object", field="file")
    return data


def load_scenario(path: Union[str, Path]) -> ScenarioFile:
    """
    Read and schema-check a scenario file.

    Raises:
        ScenarioError: unreadable file or invalid JSON
        pydantic.ValidationError: schema violations (with field locations)
    """
    logger.info(f"Loading scenario {path}")
    return ScenarioFile.model_validate(read_scenario_json(path))
