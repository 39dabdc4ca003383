"""Facts, derivation records and leaf-certificate checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..dynamics import Cycle, SequenceParams, in_domain, step
from ..errors import DivseqError
from ..presentation import KernelCertificate
from .statements import Statement

__all__ = [
    "CERTIFIED",
    "CONDITIONAL",
    "HYPOTHESIS",
    "STATUS_RANK",
    "Derivation",
    "Fact",
    "combine_status",
    "check_leaf",
]

CERTIFIED = "Certified"
CONDITIONAL = "Conditional"
HYPOTHESIS = "Hypothesis"
STATUS_RANK = {HYPOTHESIS: 0, CONDITIONAL: 1, CERTIFIED: 2}
ASSERTED = "asserted"


def combine_status(statuses):
    """Status of a conclusion: Certified iff every premise is Certified."""
    return CERTIFIED if all(s == CERTIFIED for s in statuses) else CONDITIONAL


@dataclass(frozen=True)
class Derivation:
    """How a fact was obtained: a rule and premises, or leaf witnesses."""

    rule: str = ASSERTED
    premises: tuple = ()
    kernel: KernelCertificate | None = None
    cycles: tuple = ()
    paths: tuple = ()
    source: dict | None = field(default=None, compare=False)

    def to_json(self):
        d = {"rule": self.rule, "premises": list(self.premises)}
        if self.kernel is not None:
            d["kernel"] = self.kernel.to_json()
        if self.cycles:
            d["cycles"] = [list(c.members) for c in self.cycles]
        if self.paths:
            d["paths"] = [list(p) for p in self.paths]
        if self.source is not None:
            d["source"] = self.source
        return d

    @classmethod
    def from_json(cls, d):
        kernel = d.get("kernel")
        return cls(
            d.get("rule", ASSERTED),
            tuple(int(i) for i in d.get("premises", ())),
            KernelCertificate.from_json(kernel) if kernel is not None else None,
            tuple(Cycle.from_members(m) for m in d.get("cycles", ())),
            tuple(tuple(int(v) for v in p) for p in d.get("paths", ())),
            d.get("source"),
        )


@dataclass
class Fact:
    statement: Statement
    status: str = HYPOTHESIS
    derivation: Derivation = field(default_factory=Derivation)
    id: int | None = None

    def __post_init__(self):
        if self.status not in STATUS_RANK:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def rule(self):
        return self.derivation.rule

    @property
    def premises(self):
        return self.derivation.premises

    @property
    def conditional_on(self):
        return list(self.derivation.premises) if self.status == CONDITIONAL else []

    def to_json(self):
        return {
            "id": self.id,
            "text": str(self.statement),
            "statement": self.statement.to_json(),
            "status": self.status,
            "conditional_on": self.conditional_on,
            "derivation": self.derivation.to_json(),
        }

    @classmethod
    def from_json(cls, d):
        deriv = d.get("derivation") or d.get("certificate") or {}
        return cls(
            Statement.from_json(d["statement"]),
            d.get("status", HYPOTHESIS),
            Derivation.from_json(deriv),
            d.get("id"),
        )


def _params(ref):
    return SequenceParams(ref.p, ref.q, ref.domain, allow_unusual=True)


def _valid_path(path, params):
    try:
        return all(step(a, params) == b for a, b in zip(path, path[1:]))
    except DivseqError:
        return False


def check_leaf(statement, derivation):
    """Replay the witnesses of an asserted Certified fact."""
    kind, args = statement.kind, statement.args
    try:
        if kind == "KernelMember":
            x, g = args
            cert = derivation.kernel
            return (
                cert is not None
                and g.variant == "H"
                and not g.quotient_by
                and (cert.p, cert.q, cert.domain) == g.triple
                and cert.element == x
                and cert.replay()
            )
        if kind == "ClassLowerBound":
            s, n = args
            params = _params(s)
            ids = {c.id for c in derivation.cycles}
            return len(ids) >= n and all(c.verify(params) for c in derivation.cycles)
        if kind == "EquivToOne":
            s, x = args
            if len(derivation.paths) != 2:
                return False
            xp, op = derivation.paths
            params = _params(s)
            return (
                bool(xp) and bool(op)
                and xp[0] == x and op[0] == 1 and xp[-1] == op[-1]
                and in_domain(x, s.domain)
                and _valid_path(xp, params) and _valid_path(op, params)
            )
    except (DivseqError, ValueError):
        return False
    return False
