"""Dispersion geometry and spectral verification tools for anisotropic Maxwell systems."""

__version__ = "0.1.0"

from .materials import (
    DiagonalMaterial,
    MaterialError,
    MaterialField,
    StandardForm,
    material_from_json,
    reduce_to_standard_form,
    validate_material,
)
from .fresnel import Covector, CharacteristicData, characteristic, curl_matrix

__all__ = [
    "__version__",
    "DiagonalMaterial",
    "MaterialError",
    "MaterialField",
    "StandardForm",
    "material_from_json",
    "reduce_to_standard_form",
    "validate_material",
    "Covector",
    "CharacteristicData",
    "characteristic",
    "curl_matrix",
]
