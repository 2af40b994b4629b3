"""Exact derived completion: cobar towers, Koszul/local homology, MultiTor and pro-towers."""
from .completion import (
    CompletionProblem,
    compare_gm_cobar,
    derived_completion,
    fiber_tower_check,
    gm_completion,
    multitor,
)
from .complexes import ChainComplex, ChainMap, homology, homology_group
from .modules import ModuleMap, PresentedModule, canonical_form, parse_module
from .resolutions import DGAlgebra, koszul_dga
from .rings import ZZ, parse_ring

__version__ = "0.1.0"

__all__ = [
    "ChainComplex",
    "ChainMap",
    "CompletionProblem",
    "DGAlgebra",
    "ModuleMap",
    "PresentedModule",
    "ZZ",
    "canonical_form",
    "compare_gm_cobar",
    "derived_completion",
    "fiber_tower_check",
    "gm_completion",
    "homology",
    "homology_group",
    "koszul_dga",
    "multitor",
    "parse_module",
    "parse_ring",
    "__version__",
]
