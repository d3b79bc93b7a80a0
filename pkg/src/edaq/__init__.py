"""Discrete-time single-server queue with exponentially delayed arrivals."""

from .polys import BiPoly, PolyZ, QSeriesPoly
from .solver import (CoeffTables, ModelParamsExact, build_tables,
                     build_tables_via_a_recursion, queue_pmf)
from .simulator import EmpiricalDist, ModelParamsFloat, QueueState

__all__ = [
    "BiPoly", "PolyZ", "QSeriesPoly",
    "CoeffTables", "ModelParamsExact", "build_tables", "build_tables_via_a_recursion", "queue_pmf",
    "EmpiricalDist", "ModelParamsFloat", "QueueState",
]
