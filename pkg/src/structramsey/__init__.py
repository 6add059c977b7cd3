"""Partition arrows, Ramsey witnesses and class-level checks for finite
relational structures."""

from .arrow import (
    ArrowCertificate,
    Coloring,
    check_arrow,
    check_arrow_defect,
    check_arrow_hypergraph,
    check_simultaneous,
    verify_arrow,
)
from .core import FiniteStructure, Signature, embedding_maps, enumerate_embeddings, linear_order
from .errors import BudgetExceeded, ClassError, InvariantError, StructureError
from .hales_jewett import CombinatorialLine, enumerate_lines, hj_number
from .partite import PartiteStructure, nr_power, partite_construction, partite_construction_forb, partite_lemma_witness
from .trees import construct_ramsey_tree, structure_to_tree, tree_to_structure

__all__ = [
    "ArrowCertificate",
    "BudgetExceeded",
    "ClassError",
    "Coloring",
    "CombinatorialLine",
    "FiniteStructure",
    "InvariantError",
    "PartiteStructure",
    "Signature",
    "StructureError",
    "check_arrow",
    "check_arrow_defect",
    "check_arrow_hypergraph",
    "check_simultaneous",
    "construct_ramsey_tree",
    "embedding_maps",
    "enumerate_embeddings",
    "enumerate_lines",
    "hj_number",
    "linear_order",
    "nr_power",
    "partite_construction",
    "partite_construction_forb",
    "partite_lemma_witness",
    "structure_to_tree",
    "tree_to_structure",
    "verify_arrow",
]
