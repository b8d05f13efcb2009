"""Grassmann numbers, supermatrices, orthosymplectic supergroups and superqubits."""

from .grassmann import AlgebraContext, Parity, Supernumber, parse_supernumber, format_supernumber
from .supermatrix import Supermatrix, berezinian, expm, graded_tensor, supertranspose, superadjoint
from .osp import FormConvention, build_forms, build_generators, uosp_element, check_group_element
from .superqubit import (
    SuperqubitState,
    apply,
    build_global_form,
    global_dims,
    inner_product,
    local_embed,
    norm2,
    orbit_rank,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraContext", "Parity", "Supernumber", "parse_supernumber", "format_supernumber",
    "Supermatrix", "berezinian", "expm", "graded_tensor", "supertranspose", "superadjoint",
    "FormConvention", "build_forms", "build_generators", "uosp_element", "check_group_element",
    "SuperqubitState", "apply", "build_global_form", "global_dims", "inner_product",
    "local_embed", "norm2", "orbit_rank",
]
