"""Lattice-surgery CNOT routing with teleportation trees.

Thin wrapper over the C++ core. JSON-valued results come back as Python objects.
"""

import json

from . import _teleroute
from ._teleroute import (
    BenchError,
    Circuit,
    CircuitParseError,
    Layout,
    RoutingError,
    Schedule,
    build_layout,
    check_schedule,
    layout_density,
    parse_circuit,
    protocol_names,
    random_circuit,
    route_static,
    window_layout,
)

__all__ = [
    "BenchError",
    "Circuit",
    "CircuitParseError",
    "Layout",
    "RoutingError",
    "Schedule",
    "build_layout",
    "check_schedule",
    "compile_optimized",
    "default_config",
    "graph",
    "layout_density",
    "parse_circuit",
    "protocol_names",
    "random_circuit",
    "route_static",
    "run_sample",
    "schedule_dict",
    "verify_protocol",
    "window_layout",
]


def _config_text(config):
    return "" if config is None else json.dumps(config)


def default_config():
    return json.loads(_teleroute.default_config())


def compile_optimized(layout, circuit, config=None):
    """Returns (schedule, stats). ``config`` is a dict of annealing parameters."""
    return _teleroute.compile_optimized(layout, circuit, _config_text(config))


def verify_protocol(name):
    return json.loads(_teleroute.verify_protocol(name))


def run_sample(layout, q, g, d_l, seed=0, config=None):
    return json.loads(_teleroute.run_sample(layout, q, g, d_l, seed, _config_text(config)))


def schedule_dict(schedule):
    return json.loads(schedule.to_json())


def graph(layout):
    return json.loads(layout.graph_json())
