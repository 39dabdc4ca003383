"""Statement schemas for the fact store, with a small text syntax.

Text forms::

    H(7,2)  H(7,2,nonzero)  Hbar(3,2)/<8>  Ker(7,2)     group references
    C(3,2,pos)                                           sequence references
    KernelMember(8, H(7,2))   QuotientOf(H(5,2), ?)      statements / patterns

The domain defaults to ``pos``.  ``?`` is a wildcard in patterns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..dynamics import DOMAINS, POSITIVE

__all__ = [
    "GroupRef",
    "SeqRef",
    "Statement",
    "Pattern",
    "KINDS",
    "ANY",
    "parse_statement",
    "parse_pattern",
    "H",
    "Hbar",
    "Ker",
    "seq",
]

VARIANTS = ("H", "Hbar", "Ker")


@dataclass(frozen=True, order=True)
class GroupRef:
    """H(p, q), its overline variant, or the kernel group, over one domain.

    ``quotient_by`` lists elements adjoined as ``= 1``; it is kept sorted
    and free of duplicates.
    """

    variant: str
    p: int
    q: int
    domain: str = POSITIVE
    quotient_by: tuple = ()

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown group variant {self.variant!r}")
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.p == 0 or self.q == 0:
            raise ValueError("p and q must be nonzero")
        if self.domain == POSITIVE and (self.p < 0 or self.q < 0):
            raise ValueError("negative parameters need the nonzero domain")
        object.__setattr__(self, "quotient_by", tuple(sorted(set(self.quotient_by))))

    @property
    def triple(self):
        return (self.p, self.q, self.domain)

    def base(self):
        return GroupRef("H", self.p, self.q, self.domain)

    def __str__(self):
        dom = "" if self.domain == POSITIVE else f",{self.domain}"
        quo = f"/<{','.join(map(str, self.quotient_by))}>" if self.quotient_by else ""
        return f"{self.variant}({self.p},{self.q}{dom}){quo}"

    def to_json(self):
        return {"group": self.variant, "p": self.p, "q": self.q, "domain": self.domain,
                "quotient_by": list(self.quotient_by)}

    @classmethod
    def from_json(cls, d):
        return cls(d["group"], int(d["p"]), int(d["q"]), d.get("domain", POSITIVE),
                   tuple(int(x) for x in d.get("quotient_by", ())))


@dataclass(frozen=True, order=True)
class SeqRef:
    """The division sequence C(p, q) on a domain."""

    p: int
    q: int
    domain: str = POSITIVE

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")

    @property
    def triple(self):
        return (self.p, self.q, self.domain)

    def __str__(self):
        return f"C({self.p},{self.q},{self.domain})"

    def to_json(self):
        return {"seq": True, "p": self.p, "q": self.q, "domain": self.domain}

    @classmethod
    def from_json(cls, d):
        return cls(int(d["p"]), int(d["q"]), d.get("domain", POSITIVE))


def H(p, q, domain=POSITIVE, quotient_by=()):
    return GroupRef("H", p, q, domain, tuple(quotient_by))


def Hbar(p, q, domain=POSITIVE, quotient_by=()):
    return GroupRef("Hbar", p, q, domain, tuple(quotient_by))


def Ker(p, q, domain=POSITIVE):
    return GroupRef("Ker", p, q, domain)


def seq(p, q, domain=POSITIVE):
    return SeqRef(p, q, domain)


# argument signature per statement kind: g = GroupRef, s = SeqRef, i = int
KINDS = {
    "KernelMember": "ig",
    "QuotientOf": "gg",
    "Isomorphic": "gg",
    "Trivial": "g",
    "NonTrivial": "g",
    "OrderAtMost": "gi",
    "OrderAtLeast": "gi",
    "Finite": "g",
    "KernelEquals": "gg",
    "KernelContains": "gg",
    "KernelIsAllOfF": "g",
    "SingleClass": "s",
    "ClassLowerBound": "si",
    "NotEquivToOneImpliesDivides": "si",
    "EquivToOne": "si",
}
SYMMETRIC = {"Isomorphic", "KernelEquals"}
_TYPES = {"g": GroupRef, "s": SeqRef, "i": int}


class _Any:
    def __repr__(self):
        return "?"

    __str__ = __repr__


ANY = _Any()


def _arg_text(a):
    return str(a)


def _arg_json(a):
    return a if isinstance(a, int) else a.to_json()


def _arg_from_json(t, d):
    if t == "i":
        return int(d)
    if t == "s":
        return SeqRef.from_json(d)
    return GroupRef.from_json(d)


@dataclass(frozen=True)
class Statement:
    kind: str
    args: tuple

    def __post_init__(self):
        sig = KINDS.get(self.kind)
        if sig is None:
            raise ValueError(f"unknown statement kind {self.kind!r}")
        args = tuple(self.args)
        if len(args) != len(sig):
            raise ValueError(f"{self.kind} takes {len(sig)} arguments")
        for t, a in zip(sig, args):
            if not isinstance(a, _TYPES[t]) or (t == "i" and isinstance(a, bool)):
                raise TypeError(f"{self.kind}: expected {_TYPES[t].__name__}, got {a!r}")
        if self.kind in SYMMETRIC:
            args = tuple(sorted(args))
        object.__setattr__(self, "args", args)

    def key(self):
        return str(self)

    def __str__(self):
        return f"{self.kind}({', '.join(_arg_text(a) for a in self.args)})"

    def groups(self):
        return [a for a in self.args if isinstance(a, GroupRef)]

    def seqs(self):
        return [a for a in self.args if isinstance(a, SeqRef)]

    def to_json(self):
        return {"kind": self.kind, "args": [_arg_json(a) for a in self.args]}

    @classmethod
    def from_json(cls, d):
        if isinstance(d, str):
            return parse_statement(d)
        sig = KINDS.get(d["kind"])
        if sig is None:
            raise ValueError(f"unknown statement kind {d['kind']!r}")
        return cls(d["kind"], tuple(_arg_from_json(t, a) for t, a in zip(sig, d["args"])))


@dataclass(frozen=True)
class Pattern:
    """Statement template; ``ANY`` args (and kind ``?``) match anything."""

    kind: str
    args: tuple = ()
    fact_id: int | None = None

    def matches(self, statement):
        if self.kind != "?" and self.kind != statement.kind:
            return False
        if self.kind == "?" and not self.args:
            return True
        if len(self.args) != len(statement.args):
            return False
        if statement.kind in SYMMETRIC:
            a, b = self.args
            x, y = statement.args
            return (_m(a, x) and _m(b, y)) or (_m(a, y) and _m(b, x))
        return all(_m(a, x) for a, x in zip(self.args, statement.args))

    def __str__(self):
        if self.fact_id is not None:
            return f"#{self.fact_id}"
        return f"{self.kind}({', '.join(map(str, self.args))})"


def _m(pattern_arg, value):
    return pattern_arg is ANY or pattern_arg == value


_TOKEN = re.compile(r"\s*(?:(-?\d+)|([A-Za-z_][A-Za-z_0-9]*)|(/<)|(.))")


def _tokenize(text):
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the last alternative matches anything
            raise ValueError(f"cannot tokenize {text[pos:]!r}")
        pos = m.end()
        num, name, quo, ch = m.groups()
        if num is not None:
            out.append(("int", int(num)))
        elif name is not None:
            out.append(("name", name))
        elif quo is not None:
            out.append(("op", "/<"))
        elif ch.strip():
            out.append(("op", ch))
    return out


class _Parser:
    def __init__(self, text, allow_wildcards):
        self.toks = _tokenize(text)
        self.i = 0
        self.wild = allow_wildcards
        self.text = text

    def error(self, msg):
        return ValueError(f"{msg} in {self.text!r}")

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            raise self.error(f"expected {value or kind}, got {tok[1]!r}")
        self.i += 1
        return tok[1]

    def int_list(self):
        vals = [self.take("int")]
        while self.peek() == ("op", ","):
            self.take("op", ",")
            vals.append(self.take("int"))
        return vals

    def ref(self, name):
        self.take("op", "(")
        p = self.take("int")
        self.take("op", ",")
        q = self.take("int")
        domain = POSITIVE
        if self.peek() == ("op", ","):
            self.take("op", ",")
            domain = self.take("name")
        self.take("op", ")")
        if name == "C":
            return SeqRef(p, q, domain)
        quo = ()
        if self.peek() == ("op", "/<"):
            self.take("op", "/<")
            quo = tuple(self.int_list())
            self.take("op", ">")
        return GroupRef(name, p, q, domain, quo)

    def arg(self):
        kind, val = self.peek()
        if kind == "int":
            return self.take()
        if kind == "op" and val == "?":
            if not self.wild:
                raise self.error("wildcard not allowed in a statement")
            self.take()
            return ANY
        if kind == "name" and val in VARIANTS + ("C",):
            self.take()
            return self.ref(val)
        raise self.error(f"unexpected {val!r}")

    def statement(self):
        if self.peek() == ("op", "#"):
            self.take()
            return Pattern("#", (), self.take("int"))
        kind, val = self.peek()
        if kind == "op" and val == "?" and self.wild:
            self.take()
            name = "?"
        else:
            name = self.take("name")
        args = []
        if self.peek() == ("op", "("):
            self.take("op", "(")
            if self.peek() != ("op", ")"):
                args.append(self.arg())
                while self.peek() == ("op", ","):
                    self.take("op", ",")
                    args.append(self.arg())
            self.take("op", ")")
        if self.i != len(self.toks):
            raise self.error("trailing input")
        return name, tuple(args)


def parse_statement(text):
    name, args = _Parser(text, False).statement()
    if name == "#":
        raise ValueError("a fact id is not a statement")
    return Statement(name, args)


def parse_pattern(text):
    parsed = _Parser(text, True).statement()
    if isinstance(parsed, Pattern):
        return parsed
    name, args = parsed
    if name != "?" and name not in KINDS:
        raise ValueError(f"unknown statement kind {name!r}")
    return Pattern(name, args)
