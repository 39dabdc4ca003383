"""Rule engine and fact store over statements about H(p, q) and its relatives."""

from .facts import CERTIFIED, CONDITIONAL, HYPOTHESIS, Derivation, Fact, check_leaf
from .rules import RULE_IDS
from .statements import (
    ANY,
    GroupRef,
    H,
    Hbar,
    Ker,
    Pattern,
    SeqRef,
    Statement,
    parse_pattern,
    parse_statement,
    seq,
)
from .store import (
    SCHEMA,
    FactStore,
    apply_rules,
    assert_fact,
    class_lower_bound_fact,
    derivation_tree,
    dumps_store,
    equiv_to_one_fact,
    export_store,
    import_store,
    kernel_fact,
    loads_store,
    query,
    replay_fact,
    request_power,
)

__all__ = [
    "CERTIFIED", "CONDITIONAL", "HYPOTHESIS", "Derivation", "Fact", "check_leaf",
    "RULE_IDS", "ANY", "GroupRef", "H", "Hbar", "Ker", "Pattern", "SeqRef", "Statement",
    "parse_pattern", "parse_statement", "seq", "SCHEMA", "FactStore", "apply_rules",
    "assert_fact", "class_lower_bound_fact", "derivation_tree", "dumps_store",
    "equiv_to_one_fact", "export_store", "import_store", "kernel_fact", "loads_store",
    "query", "replay_fact", "request_power",
]
