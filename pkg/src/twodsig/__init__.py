"""Two-parameter signatures of fields on rectangular grids."""

from .combinatorics import ExtendedWord, LinearCombination
from .errors import InputError, ResourceLimitError, TwodsigError, UnsupportedError
from .field import Box, GridField, GridRect, Path1D, load_field, save_field
from .signature import SigQuery, SigTable, brute_force_signature, full_signature, id_signature, sym_signature

__version__ = "0.1.0"

__all__ = [
    "Box",
    "ExtendedWord",
    "GridField",
    "GridRect",
    "InputError",
    "LinearCombination",
    "Path1D",
    "ResourceLimitError",
    "SigQuery",
    "SigTable",
    "TwodsigError",
    "UnsupportedError",
    "brute_force_signature",
    "full_signature",
    "id_signature",
    "load_field",
    "save_field",
    "sym_signature",
]
