"""Finite-element dynamics of thin anisotropic membranes (Python bindings)."""

from ._core import (
    Mesh,
    MaterialParams,
    StructuredSpec,
    __version__,
    anisotropic,
    assemble,
    boundary_nodes,
    central_element_pair,
    distributed_b,
    element_load,
    element_mass,
    element_stiffness,
    fit_rate,
    generate_structured,
    isotropic,
    nearest_node,
    norm,
    read_msh,
    reference_composite,
    refine,
    run_config,
    run_study,
    shape_coefficients,
    strain_displacement,
)

__all__ = [
    "Mesh",
    "MaterialParams",
    "StructuredSpec",
    "anisotropic",
    "assemble",
    "boundary_nodes",
    "central_element_pair",
    "distributed_b",
    "element_load",
    "element_mass",
    "element_stiffness",
    "fit_rate",
    "generate_structured",
    "isotropic",
    "nearest_node",
    "norm",
    "read_msh",
    "reference_composite",
    "refine",
    "run_config",
    "run_study",
    "shape_coefficients",
    "strain_displacement",
]
