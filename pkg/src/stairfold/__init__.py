"""Exact piecewise-linear machinery for simple folds, separators and stairwells."""
from .crooked import PLIntervalMap, compose, crooked_refine, is_delta_crooked
from .cylinder import CylinderPoint, StraightSet
from .fold import FoldSequence, SimpleFold, build_fold, validate_fold
from .graph_core import ClosedSet, Graph, GraphPoint
from .separator import PLComplex, Tube
from .stairwell import BrokenStairwell, Stairwell, from_separator, validate_broken, validate_stairwell
from .unfold_engine import realize_section, reduce_to_height_one, unfold_once

__version__ = "0.1.0"

__all__ = [
    "BrokenStairwell", "ClosedSet", "CylinderPoint", "FoldSequence", "Graph", "GraphPoint",
    "PLComplex", "PLIntervalMap", "SimpleFold", "Stairwell", "StraightSet", "Tube",
    "build_fold", "compose", "crooked_refine", "from_separator", "is_delta_crooked",
    "realize_section", "reduce_to_height_one", "unfold_once", "validate_broken",
    "validate_fold", "validate_stairwell",
]
