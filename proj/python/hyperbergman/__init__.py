"""Bergman kernel bounds on hyperbolic surfaces and their symmetric products."""

import json

from ._core import (
    HyperbergmanError,
    Level,
    bx_closed_form,
    hyp_distance,
    kernel_orbit_integral,
    sweep,
    systole,
    tail_integral_closed_form,
)
from ._core import bound_report as _bound_report


def bound_report(r):
    return json.loads(_bound_report(r))


__all__ = [
    "HyperbergmanError",
    "Level",
    "bound_report",
    "bx_closed_form",
    "hyp_distance",
    "kernel_orbit_integral",
    "sweep",
    "systole",
    "tail_integral_closed_form",
]
