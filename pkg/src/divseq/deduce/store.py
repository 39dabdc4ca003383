"""Fact store: validated insertion, rule application, queries, persistence."""

from __future__ import annotations

import json
import logging

from ..dynamics import Budget, ReachedCycle, orbit
from ..errors import CorruptCertificate, InvalidCertificate, SchemaVersionMismatch
from . import rules
from .facts import (
    ASSERTED,
    CERTIFIED,
    CONDITIONAL,
    HYPOTHESIS,
    STATUS_RANK,
    Derivation,
    Fact,
    check_leaf,
    combine_status,
)
from .statements import H, Pattern, SeqRef, Statement, parse_pattern

__all__ = [
    "SCHEMA",
    "FactStore",
    "assert_fact",
    "apply_rules",
    "request_power",
    "query",
    "derivation_tree",
    "replay_fact",
    "export_store",
    "import_store",
    "dumps_store",
    "loads_store",
    "kernel_fact",
    "equiv_to_one_fact",
    "class_lower_bound_fact",
]

log = logging.getLogger(__name__)

SCHEMA = "divseq-facts/1"


class FactStore:
    """Facts by id plus an append-only event log.

    Ids are assigned in insertion order and never reused.  Replaying the
    log through :func:`assert_fact` rebuilds an identical store.
    """

    def __init__(self):
        self.facts = {}
        self.by_key = {}
        self.log = []

    def __len__(self):
        return len(self.facts)

    def __iter__(self):
        return iter(self.facts[i] for i in sorted(self.facts))

    def __contains__(self, statement):
        return statement.key() in self.by_key

    def get(self, statement):
        fid = self.by_key.get(statement.key())
        return None if fid is None else self.facts[fid]

    def _record(self, event, fact):
        self.log.append({
            "event": event,
            "id": fact.id,
            "statement": fact.statement.to_json(),
            "status": fact.status,
            "derivation": fact.derivation.to_json(),
        })


def _premise_facts(store, derivation):
    out = []
    for pid in derivation.premises:
        f = store.facts.get(pid)
        if f is None:
            raise InvalidCertificate(f"premise #{pid} is not in the store")
        out.append(f)
    return out


def _validate(store, statement, status, derivation):
    if derivation.rule == ASSERTED:
        if derivation.premises:
            raise InvalidCertificate("asserted facts cannot cite premises")
        if status == CONDITIONAL:
            raise InvalidCertificate("Conditional status only arises from derivations")
        if status == CERTIFIED and not check_leaf(statement, derivation):
            raise InvalidCertificate(f"certificate for {statement} does not replay")
        return
    if derivation.rule not in rules.RULE_IDS:
        raise InvalidCertificate(f"unknown rule {derivation.rule!r}")
    prem = _premise_facts(store, derivation)
    if not rules.check(derivation.rule, statement, prem, derivation):
        raise InvalidCertificate(f"{derivation.rule} does not yield {statement} from its premises")
    # a derived status may be weaker than its premises allow (a premise can be
    # upgraded later), never stronger
    want = combine_status(f.status for f in prem)
    if status == HYPOTHESIS or STATUS_RANK[status] > STATUS_RANK[want]:
        raise InvalidCertificate(f"{statement}: status {status} but premises give {want}")


def assert_fact(store, fact, status=None, derivation=None):
    """Insert ``fact`` (a Fact, or a Statement plus status/derivation).

    Returns the stored Fact.  A statement already present keeps its id;
    its status and derivation are replaced only by a strictly stronger
    status.  Raises InvalidCertificate when the certificate does not check.
    """
    if isinstance(fact, Statement):
        fact = Fact(fact, status or HYPOTHESIS, derivation or Derivation())
    elif status is not None or derivation is not None:
        raise TypeError("status/derivation only apply when passing a Statement")
    _validate(store, fact.statement, fact.status, fact.derivation)
    return _store(store, fact.statement, fact.status, fact.derivation)


def _store(store, statement, status, derivation):
    existing = store.get(statement)
    if existing is not None:
        if STATUS_RANK[status] <= STATUS_RANK[existing.status]:
            return existing
        existing.status = status
        existing.derivation = derivation
        store._record("upgrade", existing)
        return existing
    fid = len(store.facts) + 1
    fact = Fact(statement, status, derivation, fid)
    store.facts[fid] = fact
    store.by_key[statement.key()] = fid
    store._record("assert" if derivation.rule == ASSERTED else "derive", fact)
    return fact


def _candidate_rank(status, rule, premise_ids):
    # stronger status first; then derivations that cite evidence over bare
    # schema instances; then rule number and premise ids for determinism
    return (-STATUS_RANK[status], not premise_ids, int(rule[1:]), tuple(premise_ids))


def apply_rules(store, max_rounds=10, order=None):
    """Run the rules to a fixpoint (or ``max_rounds``).

    Each round fires every rule against a snapshot taken at the start of
    the round.  When several derivations reach one statement the strongest
    status wins, then one citing premises over a premise-free instance,
    then the lowest rule number, then the smallest premise ids; new facts are inserted in statement-key order.  The result does
    not depend on ``order``, which only exists so that this can be tested.

    Returns the facts created or upgraded, in the order that happened.
    """
    order = list(order) if order is not None else list(rules.RULE_IDS)
    changed = []
    for rnd in range(max_rounds):
        snap = rules.Snapshot(iter(store))
        best = {}
        for rule in order:
            for statement, prem, extras in rules.fire(rule, snap):
                status = combine_status(f.status for f in prem)
                ids = tuple(f.id for f in prem)
                rank = _candidate_rank(status, rule, ids)
                key = statement.key()
                cur = best.get(key)
                if cur is None or rank < cur[0]:
                    best[key] = (rank, statement, status,
                                 Derivation(rule, ids, extras.get("kernel")))
        round_changes = []
        for key in sorted(best):
            _, statement, status, deriv = best[key]
            existing = store.get(statement)
            if existing is not None and STATUS_RANK[existing.status] >= STATUS_RANK[status]:
                continue
            _validate(store, statement, status, deriv)
            round_changes.append(_store(store, statement, status, deriv))
        log.debug("round %d: %d new or upgraded facts", rnd + 1, len(round_changes))
        if not round_changes:
            break
        changed.extend(round_changes)
    return changed


def request_power(store, p, q, n, domain="pos"):
    """Instantiate R1 for an explicit exponent: QuotientOf(H(p,q), H(p,q**n))."""
    if n < 1:
        raise ValueError("n must be at least 1")
    st = Statement("QuotientOf", (H(p, q, domain), H(p, q**n, domain)))
    return assert_fact(store, st, CERTIFIED, Derivation("R1"))


def replay_fact(store, fact, _done=None):
    """Re-check ``fact`` and, recursively, every premise down to the leaves."""
    done = _done if _done is not None else set()
    if fact.id in done:
        return True
    try:
        _validate(store, fact.statement, fact.status, fact.derivation)
    except InvalidCertificate:
        return False
    done.add(fact.id)
    return all(replay_fact(store, store.facts[i], done) for i in fact.premises)


def _as_pattern(pattern):
    return parse_pattern(pattern) if isinstance(pattern, str) else pattern


def derivation_tree(store, fact):
    """Nested dict of ``fact`` and, recursively, its premises."""
    node = {
        "id": fact.id,
        "text": str(fact.statement),
        "status": fact.status,
        "rule": fact.rule,
    }
    if fact.derivation.kernel is not None:
        node["kernel"] = fact.derivation.kernel.to_json()
    node["premises"] = [derivation_tree(store, store.facts[i]) for i in fact.premises]
    return node


def query(store, pattern):
    """Facts matching ``pattern`` (text or Pattern) with their derivation trees."""
    pat = _as_pattern(pattern)
    if isinstance(pat, Pattern) and pat.fact_id is not None:
        f = store.facts.get(pat.fact_id)
        hits = [f] if f is not None else []
    else:
        hits = [f for f in store if pat.matches(f.statement)]
    return [{"fact": f.to_json(), "tree": derivation_tree(store, f)} for f in hits]


def export_store(store):
    return {
        "schema": SCHEMA,
        "facts": [f.to_json() for f in store],
        "log": list(store.log),
    }


def dumps_store(store):
    return json.dumps(export_store(store), sort_keys=True, indent=2) + "\n"


def import_store(doc):
    """Rebuild a store by replaying ``doc["log"]`` with full validation."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("schema") != SCHEMA:
        raise SchemaVersionMismatch(f"expected schema {SCHEMA!r}, got {doc.get('schema')!r}")
    store = FactStore()
    for ev in doc.get("log", []):
        try:
            statement = Statement.from_json(ev["statement"])
            deriv = Derivation.from_json(ev["derivation"])
            fact = assert_fact(store, statement, ev["status"], deriv)
        except InvalidCertificate as exc:
            raise CorruptCertificate(f"log event for fact #{ev.get('id')}: {exc}") from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptCertificate(f"malformed log event {ev!r}: {exc}") from exc
        if fact.id != ev.get("id") or fact.status != ev["status"]:
            raise CorruptCertificate(f"log event for fact #{ev.get('id')} does not replay")
    want = json.loads(json.dumps(doc.get("facts", []), sort_keys=True))
    got = json.loads(json.dumps(export_store(store)["facts"], sort_keys=True))
    if want != got:
        raise CorruptCertificate("facts section disagrees with the replayed log")
    return store


def loads_store(text):
    return import_store(json.loads(text))


# --- leaf facts from computations -------------------------------------------

def kernel_fact(cert, source=None):
    """Certified KernelMember fact carrying ``cert``."""
    g = H(cert.p, cert.q, cert.domain)
    return Fact(Statement("KernelMember", (cert.element, g)), CERTIFIED,
                Derivation(kernel=cert, source=source))


def equiv_to_one_fact(x, params, budget=None):
    """Certified EquivToOne fact from the orbits of ``x`` and 1, or None."""
    budget = budget or Budget()
    one = orbit(1, params, budget)
    if not isinstance(one.status, ReachedCycle):
        return None
    index = {v: i for i, v in enumerate(one.path)}
    xs = orbit(x, params, budget).path
    for j, v in enumerate(xs):
        if v in index:
            paths = (tuple(xs[: j + 1]), tuple(one.path[: index[v] + 1]))
            st = Statement("EquivToOne", (SeqRef(params.p, params.q, params.domain), x))
            return Fact(st, CERTIFIED, Derivation(paths=paths))
    return None


def class_lower_bound_fact(partition):
    """Certified ClassLowerBound fact from the cycles of a census."""
    p = partition.params
    cycles = tuple(sorted(partition.cycles.values(), key=lambda c: c.members))
    st = Statement("ClassLowerBound", (SeqRef(p.p, p.q, p.domain), len(cycles)))
    return Fact(st, CERTIFIED, Derivation(cycles=cycles, source={
        "census": {"seeds": list(partition.seeds)}}))
