"""Adjacency labels of lg n + O(1) bits for trees and forests."""

from .bits import BitString, approx, approx_pack, approx_unpack, gamma_decode, gamma_encode, snap_up, wlsb
from .caterpillar import CatLabels, NotACaterpillar, cat_check, cat_decode, cat_encode
from .graph import (
    FAMILIES,
    Forest,
    ForestError,
    GenSpec,
    RootedTree,
    attach_imaginary_root,
    enumerate_parent_arrays,
    format_forest,
    gen_tree,
    oracle_adjacent,
    parse_forest,
)
from .hld import HldInfo, decompose
from .scheme import (
    TreeEncoding,
    TreeLabel,
    WeightMap,
    assign_ids,
    assign_weights,
    decode_adjacent,
    decode_batch,
    encode_forest,
    encode_labels,
    encode_tree,
    parse_label,
    scheme_stats,
)
from .universal import (
    ForestPartition,
    UniversalGraph,
    build_universal,
    composite_decode,
    composite_encode,
    embed_check,
    peel_forests,
)

__all__ = [
    "BitString", "approx", "approx_pack", "approx_unpack", "gamma_decode", "gamma_encode",
    "snap_up", "wlsb", "CatLabels", "NotACaterpillar", "cat_check", "cat_decode", "cat_encode",
    "FAMILIES", "Forest", "ForestError", "GenSpec", "RootedTree", "attach_imaginary_root",
    "enumerate_parent_arrays", "format_forest", "gen_tree", "oracle_adjacent", "parse_forest",
    "HldInfo", "decompose", "TreeEncoding", "TreeLabel", "WeightMap", "assign_ids",
    "assign_weights", "decode_adjacent", "decode_batch", "encode_forest", "encode_labels",
    "encode_tree", "parse_label", "scheme_stats", "ForestPartition", "UniversalGraph",
    "build_universal", "composite_decode", "composite_encode", "embed_check", "peel_forests",
]

__version__ = "0.1.0"
