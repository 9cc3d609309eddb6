"""Random access and longest-common-extension queries on SLP-compressed strings."""
from .block_index import (
    LayeredIndex,
    LayerParams,
    access,
    access_instrumented,
    build_layered,
    default_params,
    extract,
    space_report,
)
from .diffcover import DifferenceCover
from .errors import SlpIndexError
from .grammar_io import read as read_grammar, write as write_grammar
from .lce_index import LceIndex, build_lce, lce, lce_instrumented
from .repair import build_grammar
from .restructure import BlockDecomposition, boundary_set, decompose
from .slp import Pair, Slp, Terminal, expand, naive_access, naive_lce, validate
from .synthetic import gen_synthetic

__all__ = [
    "BlockDecomposition", "DifferenceCover", "LayerParams", "LayeredIndex", "LceIndex",
    "Pair", "Slp", "SlpIndexError", "Terminal", "access", "access_instrumented",
    "boundary_set", "build_grammar", "build_layered", "build_lce", "decompose",
    "default_params", "expand", "extract", "gen_synthetic", "lce", "lce_instrumented",
    "naive_access", "naive_lce", "read_grammar", "space_report", "validate", "write_grammar",
]
__version__ = "0.1.0"
