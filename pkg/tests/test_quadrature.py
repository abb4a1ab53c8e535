import math

import pytest

from lwphase.core.exceptions import QuadratureError
from lwphase.services.quadrature import integrate_panels, panel_edges


def test_panel_edges_ignore_outside_corners():
    """Test corners outside the open interval are dropped and duplicates merged."""
    assert panel_edges(0.0, 1.0, [1.5, 0.5, -1.0, 0.5, 1.0, 0.25]) == [0.0, 0.25, 0.5, 1.0]


def test_kink_integrated_exactly():
    """Test |t - 0.3| is integrated to rounding when the kink is a corner."""
    result = integrate_panels(lambda t: abs(t - 0.3), 0.0, 1.0, [0.3], 1e-12)
    assert result.value == pytest.approx(0.5 * (0.3 ** 2 + 0.7 ** 2), abs=1e-14)
    assert result.panels == 2
    assert result.error <= 1e-12


def test_smooth_integrand():
    """Test a smooth integrand without corners."""
    result = integrate_panels(math.sin, 0.0, math.pi, [], 1e-12)
    assert result.value == pytest.approx(2.0, abs=1e-12)


def test_corner_order_does_not_change_result():
    """Test the compensated panel sum does not depend on corner order."""
    f = lambda t: math.exp(-t) * abs(math.sin(3.0 * t))  # noqa: E731
    corners = [math.pi / 3.0, 2.0 * math.pi / 3.0, math.pi]
    forward = integrate_panels(f, 0.0, 4.0, corners, 1e-10)
    backward = integrate_panels(f, 0.0, 4.0, list(reversed(corners)), 1e-10)
    assert forward.value == backward.value


def test_empty_interval():
    """Test b <= a integrates to zero."""
    result = integrate_panels(math.cos, 1.0, 1.0, [], 1e-9)
    assert result.value == 0.0
    assert result.panels == 0


def test_budget_not_met_raises():
    """Test a panel that cannot meet its share of the budget raises."""
    with pytest.raises(QuadratureError):
        integrate_panels(lambda t: 1.0 / t, 1e-12, 1.0, [], 1e-12, limit=3)


def test_non_positive_tolerance():
    """Test the tolerance must be positive."""
    with pytest.raises(ValueError):
        integrate_panels(math.cos, 0.0, 1.0, [], 0.0)
