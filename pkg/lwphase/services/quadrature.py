"""
Kink-aware adaptive quadrature.

The interval is cut at every corner of the integrand, each panel is handed to
QUADPACK's adaptive Gauss-Kronrod rule (embedded error estimate), and panel
results are combined with compensated summation so the total does not depend
on evaluation order.
"""
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional

from scipy.integrate import quad

from ..core.config import settings
from ..core.exceptions import QuadratureError
from ..core.logger import logger


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    panels: int


def panel_edges(a: float, b: float, corners: Iterable[float]) -> List[float]:
    """Sorted panel edges of [a, b]; corners outside (a, b) are ignored."""
    inner = sorted({float(p) for p in corners if a < p < b})
    return [a] + inner + [b]


def integrate_panels(
    f: Callable[[float], float],
    a: float,
    b: float,
    corners: Iterable[float],
    tol: float,
    limit: Optional[int] = None,
) -> QuadratureResult:
    """
    Integrate f over [a, b] without letting any panel straddle a corner.

    Args:
        f: integrand, smooth on each panel
        a: lower bound
        b: upper bound (b >= a)
        corners: points where f or its derivatives jump
        tol: absolute error budget for the whole interval
        limit: subdivision cap per panel

    Returns:
        QuadratureResult with the compensated sum and the summed error estimate

    Raises:
        QuadratureError: if a panel misses its share of the budget
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if b <= a:
        return QuadratureResult(0.0, 0.0, 0)

    edges = panel_edges(a, b, corners)
    n_panels = len(edges) - 1
    panel_tol = tol / n_panels
    limit = limit or settings.QUADRATURE_LIMIT

    values, errors = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        result = quad(f, lo, hi, epsabs=panel_tol, epsrel=0.0, limit=limit, full_output=1)
        value, error = result[0], result[1]
        if error > panel_tol:
            message = result[3] if len(result) > 3 else "error estimate above budget"
            raise QuadratureError(
                f"panel [{lo!r}, {hi!r}] error {error!r} exceeds budget {panel_tol!r}: {message}"
            )
        values.append(value)
        errors.append(error)

    logger.debug(f"integrated {n_panels} panels on [{a!r}, {b!r}]")
    return QuadratureResult(math.fsum(values), math.fsum(errors), n_panels)
