"""Exact tooling for network Bell tests built from segmented Pauli operators."""

__version__ = "0.1.0"

from . import cli, lhv, network, pauli, quantum, sampler, scenario, states  # noqa: F401
