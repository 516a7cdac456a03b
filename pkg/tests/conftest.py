import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
sys.path.insert(0, os.path.dirname(__file__))

from crinv.corpus import CYLINDER, FREEMAN, HYPERPLANE, LIE_BALL, LIGHT_CONE, SPHERE  # noqa: E402
from crinv.cr_core import levi_form  # noqa: E402
from crinv.hypersurface import build_cr_frame, parse_defining_function, validate_point  # noqa: E402
from crinv.normalize import build_adapted_coframe, structure_scalars  # noqa: E402
from crinv.parallelism5d import solve  # noqa: E402


class Pipeline:
    """Frame, Levi data, coframe and scalars for one (surface, point, mode, order)."""

    def __init__(self, src, point, mode="exact", order=6, orientation=1, dim=None):
        self.rho = parse_defining_function(src, dim)
        self.point = validate_point(self.rho, point, mode)
        self.frame = build_cr_frame(self.rho, self.point, order)
        self.levi = levi_form(self.frame)
        self.mode = mode
        self.orientation = orientation
        self._cof = None
        self._ss = None

    @property
    def cof(self):
        if self._cof is None:
            self._cof = build_adapted_coframe(self.frame, self.levi, orientation=self.orientation)
        return self._cof

    @property
    def ss(self):
        if self._ss is None:
            self._ss = structure_scalars(self.cof)
        return self._ss

    def parallelism(self):
        return solve(self.ss, self.cof)


_cache = {}


def pipeline(src, point, mode="exact", order=6, orientation=1, dim=None):
    key = (src, tuple(point), mode, order, orientation, dim)
    if key not in _cache:
        _cache[key] = Pipeline(src, point, mode, order, orientation, dim)
    return _cache[key]


@pytest.fixture(scope="session")
def cone_exact():
    return pipeline(LIGHT_CONE, ["3", "4", "5"], "exact", 6)


@pytest.fixture(scope="session")
def cone_float():
    return pipeline(LIGHT_CONE, ["3", "4", "5"], "float", 6)


@pytest.fixture(scope="session")
def cone_pd_exact():
    """Case 1 parallelism on the cone at chart order 9 (curvature known at p0)."""
    return pipeline(LIGHT_CONE, ["3", "4", "5"], "exact", 9).parallelism()


@pytest.fixture(scope="session")
def cone_pd_float():
    return pipeline(LIGHT_CONE, ["3", "4", "5"], "float", 9).parallelism()


@pytest.fixture(scope="session")
def freeman_pd():
    c = repr(float(1 + 1.2 ** 3) ** (1 / 3))
    return pipeline(FREEMAN, ["1", "6/5", c], "float", 9).parallelism()


@pytest.fixture(scope="session")
def lie_ball_pd_exact():
    return pipeline(LIE_BALL, ["3/4", "1/4i", "0"], "exact", 9).parallelism()


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


__all__ = ["pipeline", "LIGHT_CONE", "SPHERE", "HYPERPLANE", "CYLINDER", "FREEMAN", "LIE_BALL"]
