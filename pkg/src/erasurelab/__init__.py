"""Workbench for ML / iterative / hybrid erasure decoding of LDPC and
fixed-rate Raptor codes on the binary erasure channel, with ensemble
analysis tools and a Monte Carlo simulation harness."""

from . import analysis, binmat, decode, ldpc, raptor, sim  # noqa: F401

__version__ = "0.1.0"
