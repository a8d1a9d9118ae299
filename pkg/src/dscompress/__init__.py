"""Document compression with a hierarchical noisy-channel model."""

__version__ = "0.1.0"

from .chooser import SelectionPolicy, choose
from .decoder import DecodeOptions, decode, reconstruct
from .errors import (AlignmentError, DataError, DerivationLimitError, DSCompressError,
                     ParseError, ResourceError, ValidationError)
from .forest import ForestOptions, build_forest, count_derivations, enumerate_derivations
from .pipeline import CompressConfig, ModelSet, compress_tree
from .tree import DSTree, parse_dstree, read_dstree, serialize_dstree, yield_words

__all__ = [
    "AlignmentError", "CompressConfig", "DSCompressError", "DSTree", "DataError",
    "DecodeOptions", "DerivationLimitError", "ForestOptions", "ModelSet", "ParseError",
    "ResourceError", "SelectionPolicy", "ValidationError", "build_forest", "choose",
    "compress_tree", "count_derivations", "decode", "enumerate_derivations",
    "parse_dstree", "read_dstree", "reconstruct", "serialize_dstree", "yield_words",
]
