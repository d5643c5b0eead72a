"""Completions of bounded derived categories of Dynkin quivers with respect to metrics."""

from __future__ import annotations

from .complete import (CompletionReport, completion, enumerate_thick, enumerate_thick_bruteforce,
                       realize_as_completion, supports, thick_hasse_dot, transport_check)
from .dercat import DerIndec, DerObject, HomTable, build_hom_table, serre_failures
from .functor import FunctorSpec, evaluation_pair, image_metric, is_compression, preimage_metric, serre_conjugate
from .metric import (Constant, Metric, Shift, Slowdown, cohomology_metric, compare, improvement, make_aisle_metric,
                     make_constant_metric, slowdown, standard_aisle, validate)
from .quiver import Quiver, parse_quiver, standard_quiver
from .shiftset import ShiftSet
from .subcat import Subcategory, left_perp, right_perp, thick_closure

__version__ = "0.1.0"

__all__ = [
    "CompletionReport", "completion", "enumerate_thick", "enumerate_thick_bruteforce", "realize_as_completion",
    "supports", "thick_hasse_dot", "transport_check", "DerIndec", "DerObject", "HomTable", "build_hom_table",
    "serre_failures", "FunctorSpec", "evaluation_pair", "image_metric", "is_compression", "preimage_metric",
    "serre_conjugate", "Constant", "Metric", "Shift", "Slowdown", "cohomology_metric", "compare", "improvement",
    "make_aisle_metric", "make_constant_metric", "slowdown", "standard_aisle", "validate", "Quiver",
    "parse_quiver", "standard_quiver", "ShiftSet", "Subcategory", "left_perp", "right_perp", "thick_closure",
]
