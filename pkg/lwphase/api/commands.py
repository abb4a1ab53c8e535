"""
Command handlers behind the ``lwphase`` subcommands.

Handlers return a process exit code and write their result to --out or to
stdout. JSON is emitted with sorted keys and shortest round-trip floats so
identical inputs give byte-identical output.
"""
import copy
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.exceptions import ScenarioError
from ..core.logger import logger
from ..core.performance import time_it
from ..services.action import ActionModel, PhaseTable, delta_phi, wrap_phase
from ..services.entanglement import SpinState
from ..services.phase_service import phase_service
from .schema import LoadedScenario, ScenarioFile, load_scenario, read_scenario_json
from .units import split_quantity

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SCHEMA = 2
EXIT_NUMERICAL = 3

SWEEP_COLUMNS = ["param", "phi_uu", "phi_ud", "phi_du", "phi_dd", "delta_phi", "negativity", "model"]


def dumps_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_output(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def resolve_tolerance(cli_tol: Optional[float], loaded: LoadedScenario) -> float:
    """CLI flag, then scenario file, then DEFAULT_TOLERANCE (environment or default)."""
    return phase_service.resolve_tolerance(cli_tol if cli_tol is not None else loaded.tolerance)


def parse_amplitudes(text: Optional[str], n_particles: int) -> SpinState:
    """
    Initial amplitudes from a JSON list of reals or [re, im] pairs, in basis
    order; normalized on the way in. Uniform when omitted.
    """
    if text is None:
        return SpinState.uniform(n_particles)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"amplitudes are not valid JSON: {e}", field="amplitudes")
    if not isinstance(raw, list) or len(raw) != 2 ** n_particles:
        raise ScenarioError(f"expected a list of {2 ** n_particles} amplitudes", field="amplitudes")
    values = []
    for k, item in enumerate(raw):
        if isinstance(item, list) and len(item) == 2:
            values.append(complex(float(item[0]), float(item[1])))
        elif isinstance(item, (int, float)) and not isinstance(item, bool):
            values.append(complex(float(item)))
        else:
            raise ScenarioError(f"expected a number or [re, im], got {item!r}", field=f"amplitudes.{k}")
    return SpinState.normalized(values)


def table_payload(table: PhaseTable, loaded: LoadedScenario) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "digest": table.scenario_digest,
        "model": table.model.value,
        "interaction": loaded.scenario.interaction.value,
        "tolerance": table.tolerance,
        "phases": [
            {"sigma": s.label, "phase": table.entries[s].phase, "quad_error": table.entries[s].quad_error}
            for s in table.configurations()
        ],
    }
    if table.n_particles == 2:
        payload["delta_phi"] = delta_phi(table)
        payload["delta_phi_wrapped"] = wrap_phase(payload["delta_phi"])
    return payload


def _compute_table(loaded: LoadedScenario, model: Optional[str], tol: Optional[float], workers: Optional[int]):
    model = ActionModel(model) if model is not None else loaded.model
    return phase_service.tabulate(loaded.scenario, model, resolve_tolerance(tol, loaded), workers=workers)


@time_it
def cmd_phase(
    file: str,
    model: Optional[str] = None,
    tol: Optional[float] = None,
    out: Optional[str] = None,
    fmt: str = "json",
    workers: Optional[int] = None,
) -> int:
    """Phase table of a scenario file as JSON or CSV."""
    loaded = load_scenario(file).build()
    table = _compute_table(loaded, model, tol, workers)
    if fmt == "csv":
        rows = [
            {
                "sigma": s.label,
                "phase": table.entries[s].phase,
                "quad_error": table.entries[s].quad_error,
                "model": table.model.value,
                "digest": table.scenario_digest,
            }
            for s in table.configurations()
        ]
        text = pd.DataFrame(rows, columns=["sigma", "phase", "quad_error", "model", "digest"]).to_csv(
            index=False, lineterminator="\n"
        )
    else:
        text = dumps_json(table_payload(table, loaded))
    write_output(text, out)
    return EXIT_OK


@time_it
def cmd_entangle(
    file: str,
    amplitudes: Optional[str] = None,
    out: Optional[str] = None,
    model: Optional[str] = None,
    tol: Optional[float] = None,
    partition: Optional[Sequence[int]] = None,
    workers: Optional[int] = None,
) -> int:
    """Negativity, concurrence and additivity verdict for the evolved spin state."""
    loaded = load_scenario(file).build()
    table = _compute_table(loaded, model, tol, workers)
    initial = parse_amplitudes(amplitudes, table.n_particles)
    report = phase_service.entangle(initial, table, partition)
    payload = table_payload(table, loaded)
    payload.update(
        {
            "negativity": report.negativity,
            "concurrence": report.concurrence,
            "is_separable_by_phase_additivity": report.is_separable_by_phase_additivity,
            "phase_residual": report.phase_residual,
        }
    )
    write_output(dumps_json(payload), out)
    return EXIT_OK


def _set_path(data: Dict[str, Any], path: str, value: Any) -> None:
    """Assign value at a dotted path (list indices allowed); the path must already exist."""
    keys = path.split(".")
    node: Any = data
    for depth, key in enumerate(keys):
        last = depth == len(keys) - 1
        if isinstance(node, list):
            try:
                index = int(key)
                node[index]
            except (ValueError, IndexError):
                raise ScenarioError("swept parameter does not exist in the file", field=path)
            if last:
                node[index] = value
            else:
                node = node[index]
        elif isinstance(node, dict) and key in node:
            if last:
                node[key] = value
            else:
                node = node[key]
        else:
            raise ScenarioError("swept parameter does not exist in the file", field=path)


def sweep_values(value_range: Sequence[str], steps: int) -> List[tuple]:
    """(number, unit) pairs evenly spaced over the range; both ends must share one unit."""
    if steps < 1:
        raise ScenarioError(f"must be at least 1, got {steps}", field="steps")
    lo, lo_unit = split_quantity(_as_number(value_range[0]), "range.0")
    hi, hi_unit = split_quantity(_as_number(value_range[1]), "range.1")
    if lo_unit != hi_unit:
        raise ScenarioError(f"range ends use different units ({lo_unit!r}, {hi_unit!r})", field="range")
    values = [lo] if steps == 1 else np.linspace(lo, hi, steps).tolist()
    return [(float(v), lo_unit) for v in values]


def _as_number(text: str) -> Any:
    try:
        return float(text)
    except ValueError:
        return text


@time_it
def cmd_sweep(
    file: str,
    params: Sequence[str],
    value_range: Sequence[str],
    steps: int,
    out: Optional[str] = None,
    models: Optional[Sequence[str]] = None,
    tol: Optional[float] = None,
    workers: Optional[int] = None,
) -> int:
    """
    Sweep one scenario-file value (or several tied values) and tabulate
    phases, delta_phi and negativity, one row per value per model.

    Args:
        file: scenario file
        params: dotted paths into the file; all receive the same value
        value_range: two quantities, e.g. ("1 ns", "10 ns")
        steps: number of values
        out: CSV destination, stdout if omitted
        models: action models to run, all three by default
        tol: quadrature tolerance override
        workers: process pool size
    """
    base = read_scenario_json(file)
    model_list = [ActionModel(m) for m in (models or [m.value for m in ActionModel])]
    rows = []
    for value, unit in sweep_values(value_range, steps):
        data = copy.deepcopy(base)
        for path in params:
            _set_path(data, path, f"{value!r} {unit}" if unit else value)
        loaded = ScenarioFile.model_validate(data).build()
        if loaded.scenario.n_particles != 2:
            raise ScenarioError("sweeps tabulate two-particle scenarios", field="particles")
        for model in model_list:
            table = _compute_table(loaded, model.value, tol, workers)
            report = phase_service.entangle(SpinState.uniform(2), table)
            rows.append(
                {
                    "param": value,
                    "phi_uu": table["uu"].phase,
                    "phi_ud": table["ud"].phase,
                    "phi_du": table["du"].phase,
                    "phi_dd": table["dd"].phase,
                    "delta_phi": delta_phi(table),
                    "negativity": report.negativity,
                    "model": model.value,
                }
            )
        logger.info(f"sweep {','.join(params)}={value!r}{' ' + unit if unit else ''} done")
    text = pd.DataFrame(rows, columns=SWEEP_COLUMNS).to_csv(index=False, lineterminator="\n")
    write_output(text, out)
    return EXIT_OK


@time_it
def cmd_validate(
    tol_scale: float = 1.0,
    fault: Optional[str] = None,
    samples: int = 1000,
    out: Optional[str] = None,
) -> int:
    """Run the invariant suite; exit 1 if any check fails."""
    report = phase_service.validate(tol_scale=tol_scale, fault=fault, samples=samples)
    payload = {
        "passed": report.passed,
        "tol_scale": tol_scale,
        "fault": fault,
        "checks": [
            {"name": c.name, "passed": c.passed, "value": c.value, "bound": c.bound, "detail": c.detail}
            for c in report.checks
        ],
    }
    write_output(dumps_json(payload), out)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED
