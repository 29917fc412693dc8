"""Bundled instances."""

from __future__ import annotations

from importlib import resources

from .documents import parse_instance
from .model import Instance

NSFNET_EMP = "nsfnet_emp.json"


def fixture_text(name: str = NSFNET_EMP) -> str:
    return resources.files("cnmdesign").joinpath("data", name).read_text(encoding="utf-8")


def nsfnet_emp() -> Instance:
    """14-node NSFNet with six datacenters and one EMP zone over four nodes."""
    return parse_instance(fixture_text(NSFNET_EMP))
