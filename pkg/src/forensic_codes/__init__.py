"""Forensic codes: matrix and cuboid codewords that decode from any single large fragment."""

from .codec2d import CodeParams2D, decode2d, derive_params_2d, encode2d, random_message
from .codec3d import CodeParams3D, decode3d, derive_params_3d, encode3d
from .errors import (
    CorruptFragmentError,
    DecodeError,
    ForensicError,
    GridFormatError,
    IllegalFragmentError,
    LemmaViolationError,
    OutOfRangeError,
    ParameterError,
)
from .grid import BitGrid2D, BitGrid3D, read_grid, write_grid
from .robust import RobustParams, decode_robust, encode_robust, validate_params_robust

__version__ = "0.1.0"

__all__ = [
    "BitGrid2D", "BitGrid3D", "CodeParams2D", "CodeParams3D", "CorruptFragmentError",
    "DecodeError", "ForensicError", "GridFormatError", "IllegalFragmentError",
    "LemmaViolationError", "OutOfRangeError", "ParameterError", "RobustParams", "decode2d", "decode3d",
    "decode_robust", "derive_params_2d", "derive_params_3d", "encode2d", "encode3d",
    "encode_robust", "random_message", "read_grid", "validate_params_robust", "write_grid",
]
