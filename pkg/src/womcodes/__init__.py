"""Fixed-rate write-once-memory codes over DAG-modelled storage devices.

Pipeline: state graph -> greedy encoding regions -> exact message labeling
-> encoder/decoder, with an independent simulator to check the result.
"""

from .codec import FAIL, CodeTable, WriteSession, build_code_table, decode, encode, write_sequence
from .generators import FlashSpec, flash_graph, graph_for, ici_graph, load_dag, parse_dag
from .graph import TransitionGraph, build_graph, frontier, precedes, reachable_region
from .labeling import Labeling, LabelingProblem, brute_force_oracle, build_problem, solve_exact
from .regions import UNBOUNDED, RegionFamily, build_regions, greedy_region, worst_writes
from .verifier import check_consistency, simulate_worst_writes, verify

__all__ = [
    "FAIL", "CodeTable", "WriteSession", "build_code_table", "decode", "encode", "write_sequence",
    "FlashSpec", "flash_graph", "graph_for", "ici_graph", "load_dag", "parse_dag",
    "TransitionGraph", "build_graph", "frontier", "precedes", "reachable_region",
    "Labeling", "LabelingProblem", "brute_force_oracle", "build_problem", "solve_exact",
    "UNBOUNDED", "RegionFamily", "build_regions", "greedy_region", "worst_writes",
    "check_consistency", "simulate_worst_writes", "verify",
]
