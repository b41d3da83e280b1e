"""Translate natural-language questions about a patient graph into Cypher and run them."""

from ._nlds import (
    Dataset,
    NldsError,
    ParseError,
    Service,
    candidate_id,
    generate_data,
    grammar_sample,
    memory_estimate,
)

__all__ = [
    "Dataset",
    "NldsError",
    "ParseError",
    "Service",
    "candidate_id",
    "generate_data",
    "grammar_sample",
    "memory_estimate",
]
