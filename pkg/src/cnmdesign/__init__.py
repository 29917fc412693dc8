"""Disaster-resilient SDN control-plane design and evaluation."""

from .disaster import DisasterModel, DisasterZone, design_risk, path_risk, path_survives
from .documents import parse_design, parse_instance, serialize_design, serialize_instance
from .evaluation import DisruptionReport, SweepRow, render_report, simulate, sweep
from .fixtures import nsfnet_emp
from .model import (
    CNMDesign,
    FeasibilityReport,
    Instance,
    Objective,
    Parameters,
    StructuralError,
    check_feasibility,
    objective_value,
)
from .solver import SolverConfig, export_lp, import_solution, solve
from .topology import Path, PathCatalog, PhysicalNetwork, build_catalog, hop_distance, k_shortest_paths

__version__ = "0.1.0"

__all__ = [
    "CNMDesign",
    "DisasterModel",
    "DisasterZone",
    "DisruptionReport",
    "FeasibilityReport",
    "Instance",
    "Objective",
    "Parameters",
    "Path",
    "PathCatalog",
    "PhysicalNetwork",
    "SolverConfig",
    "StructuralError",
    "SweepRow",
    "build_catalog",
    "check_feasibility",
    "design_risk",
    "export_lp",
    "hop_distance",
    "import_solution",
    "k_shortest_paths",
    "nsfnet_emp",
    "objective_value",
    "parse_design",
    "parse_instance",
    "path_risk",
    "path_survives",
    "render_report",
    "serialize_design",
    "serialize_instance",
    "simulate",
    "solve",
    "sweep",
]
