"""Deduction rules R1-R14 over a snapshot of facts.

Every rule has two halves: ``fire`` enumerates conclusions from a
snapshot, and ``check`` decides whether a recorded conclusion follows
from given premise statements.  The checker is what certificate replay
runs, so it is written directly against the rule schema and does not call
``fire``.

Rules that relate ``H(p, q)`` to ``H(p, q**n)`` or to other parameter
pairs without premises are instantiated only for parameter triples that
already occur somewhere in the store.
"""

from __future__ import annotations

from collections import defaultdict

from sympy import divisors, integer_nthroot

from ..dynamics import NONZERO, POSITIVE, in_domain
from .statements import H, Hbar, Ker, SeqRef, Statement

__all__ = ["RULE_IDS", "Snapshot", "fire", "check", "power_exponent", "integer_roots"]

RULE_IDS = tuple(f"R{i}" for i in range(1, 15))


def power_exponent(Q, q):
    """The ``n >= 1`` with ``q**n == Q``, or None."""
    if abs(q) < 2 or Q == 0:
        return None
    n, v = 1, q
    while abs(v) <= abs(Q):
        if v == Q:
            return n
        v *= q
        n += 1
    return None


def integer_roots(Q, domain):
    """All ``(q, n)`` with ``n >= 2``, ``|q| >= 2`` and ``q**n == Q``."""
    out = []
    n = 2
    while 2**n <= abs(Q):
        r, exact = integer_nthroot(abs(Q), n)
        if exact:
            for cand in (int(r), -int(r)):
                if cand**n == Q and in_domain(cand, domain):
                    out.append((cand, n))
        n += 1
    return out


def _plain_h(g):
    return g.variant == "H" and not g.quotient_by


def _stmt(kind, *args):
    return Statement(kind, tuple(args))


class Snapshot:
    """Read-only indexes over the facts present at the start of a round."""

    def __init__(self, facts):
        self.facts = list(facts)
        self.by_kind = defaultdict(list)
        triples = set()
        for f in self.facts:
            self.by_kind[f.statement.kind].append(f)
            for a in f.statement.args:
                if hasattr(a, "triple"):
                    triples.add(a.triple)
        self.triples = sorted(triples)
        self.km = {}
        for f in self.by_kind["KernelMember"]:
            x, g = f.statement.args
            if _plain_h(g):
                self.km[(x, g.triple)] = f

    def of(self, kind):
        return self.by_kind.get(kind, [])

    def powers(self):
        """Pairs of triples ``(p, q, d), (p, q**n, d)`` with ``n >= 2``."""
        by_pd = defaultdict(list)
        for p, q, d in self.triples:
            by_pd[(p, d)].append(q)
        for (p, d), qs in sorted(by_pd.items()):
            for q in qs:
                for Q in qs:
                    n = power_exponent(Q, q)
                    if n is not None and n >= 2:
                        yield (p, q, d), (p, Q, d)

    def r4_pairs(self):
        for (x, (p, q, d)), f1 in sorted(self.km.items(), key=lambda kv: kv[1].id):
            if x == 1:
                continue
            f2 = self.km.get((x, (p, q * x, d)))
            if f2 is not None:
                yield x, H(p, q, d), H(p, q * x, d), f1, f2


def _r4_match(s1, s2):
    """``(x, A, B)`` when the statements are KernelMember(x, H(p,q)), KernelMember(x, H(p,qx))."""
    if s1.kind != "KernelMember" or s2.kind != "KernelMember":
        return None
    (x, a), (y, b) = s1.args, s2.args
    if x != y or x == 1 or not (_plain_h(a) and _plain_h(b)):
        return None
    if b.triple != (a.p, a.q * x, a.domain):
        return None
    return x, a, b


# --- R1 ---------------------------------------------------------------------

def fire_r1(snap):
    for (p, q, d), (_, Q, _) in snap.powers():
        yield _stmt("QuotientOf", H(p, q, d), H(p, Q, d)), (), {}


def check_r1(st, prem, deriv):
    if st.kind != "QuotientOf" or prem:
        return False
    a, b = st.args
    return (_plain_h(a) and _plain_h(b) and a.p == b.p and a.domain == b.domain
            and power_exponent(b.q, a.q) is not None)


# --- R2 ---------------------------------------------------------------------

def fire_r2(snap):
    for kind in ("Trivial", "NonTrivial"):
        for f in snap.of(kind):
            (g,) = f.statement.args
            if not _plain_h(g):
                continue
            for (p, q, d), (_, Q, _) in snap.powers():
                if (p, q, d) == g.triple:
                    yield _stmt(kind, H(p, Q, d)), (f,), {}


def check_r2(st, prem, deriv):
    if st.kind not in ("Trivial", "NonTrivial") or len(prem) != 1 or prem[0].kind != st.kind:
        return False
    (a,), (b,) = prem[0].args, st.args
    return (_plain_h(a) and _plain_h(b) and a.p == b.p and a.domain == b.domain
            and power_exponent(b.q, a.q) is not None)


# --- R3 ---------------------------------------------------------------------

def _times_p(g, x):
    return H(g.p * x, g.q, g.domain)


def fire_r3(snap):
    for (x, _), f in sorted(snap.km.items(), key=lambda kv: kv[1].id):
        if x == 1:
            continue
        g = f.statement.args[1]
        yield _stmt("QuotientOf", g, _times_p(g, x)), (f,), {}


def check_r3(st, prem, deriv):
    if st.kind != "QuotientOf" or len(prem) != 1 or prem[0].kind != "KernelMember":
        return False
    x, g = prem[0].args
    return _plain_h(g) and x != 1 and st.args == (g, _times_p(g, x))


# --- R4 ---------------------------------------------------------------------

def fire_r4(snap):
    for _, a, b, f1, f2 in snap.r4_pairs():
        yield _stmt("QuotientOf", a, b), (f1, f2), {}
        yield _stmt("QuotientOf", b, a), (f1, f2), {}


def check_r4(st, prem, deriv):
    if st.kind != "QuotientOf" or len(prem) != 2:
        return False
    m = _r4_match(*prem)
    return m is not None and set(st.args) == {m[1], m[2]} and st.args[0] != st.args[1]


# --- R5 ---------------------------------------------------------------------

_FINITE_KINDS = ("Finite", "Trivial", "OrderAtMost")


def fire_r5(snap):
    for _, a, b, f1, f2 in snap.r4_pairs():
        for kind in _FINITE_KINDS:
            for f in snap.of(kind):
                g = f.statement.args[0]
                if g in (a, b):
                    yield _stmt("Isomorphic", a, b), (f1, f2, f), {}
        for f in snap.of("Trivial"):
            g = f.statement.args[0]
            if g == a:
                yield _stmt("Trivial", b), (f1, f2, f), {}
            elif g == b:
                yield _stmt("Trivial", a), (f1, f2, f), {}


def check_r5(st, prem, deriv):
    if len(prem) != 3:
        return False
    m = _r4_match(prem[0], prem[1])
    if m is None:
        return False
    _, a, b = m
    extra = prem[2]
    if st.kind == "Isomorphic":
        return (set(st.args) == {a, b} and extra.kind in _FINITE_KINDS
                and extra.args[0] in (a, b))
    if st.kind == "Trivial" and extra.kind == "Trivial":
        return {st.args[0], extra.args[0]} == {a, b}
    return False


# --- R6 ---------------------------------------------------------------------

def fire_r6(snap):
    seen = set()
    for p, q, _ in snap.triples:
        if p > 0 and q > 0 and (p, q) not in seen:
            seen.add((p, q))
            yield _stmt("QuotientOf", H(p, q, POSITIVE), H(p, q, NONZERO)), (), {}


def check_r6(st, prem, deriv):
    if st.kind != "QuotientOf" or prem:
        return False
    a, b = st.args
    return (_plain_h(a) and _plain_h(b) and (a.p, a.q) == (b.p, b.q)
            and a.domain == POSITIVE and b.domain == NONZERO)


# --- R7 ---------------------------------------------------------------------

def fire_r7(snap):
    for (p, q, d), (_, Q, _) in snap.powers():
        yield _stmt("KernelContains", H(p, Q, d), H(p, q, d)), (), {}
    for (x, _), f in sorted(snap.km.items(), key=lambda kv: kv[1].id):
        if x == 1:
            continue
        g = f.statement.args[1]
        yield _stmt("KernelContains", g, _times_p(g, x)), (f,), {}
    for _, a, b, f1, f2 in snap.r4_pairs():
        yield _stmt("KernelEquals", a, b), (f1, f2), {}


def check_r7(st, prem, deriv):
    if st.kind == "KernelContains":
        a, b = st.args
        if not prem:
            return (_plain_h(a) and _plain_h(b) and a.p == b.p and a.domain == b.domain
                    and power_exponent(a.q, b.q) is not None)
        if len(prem) == 1 and prem[0].kind == "KernelMember":
            x, g = prem[0].args
            return _plain_h(g) and x != 1 and (a, b) == (g, _times_p(g, x))
        return False
    if st.kind == "KernelEquals" and len(prem) == 2:
        m = _r4_match(*prem)
        return m is not None and set(st.args) == {m[1], m[2]}
    return False


# --- R8 ---------------------------------------------------------------------

def fire_r8(snap):
    for p, q, d in snap.triples:
        yield _stmt("QuotientOf", Hbar(p, q, d), Ker(p, q, d)), (), {}


def check_r8(st, prem, deriv):
    if st.kind != "QuotientOf" or prem:
        return False
    a, b = st.args
    return (a.variant == "Hbar" and not a.quotient_by and b.variant == "Ker"
            and a.triple == b.triple)


# --- R9 ---------------------------------------------------------------------

def fire_r9(snap):
    ts = snap.triples
    for p, q, d in ts:
        for P, Q, D in ts:
            if D != d:
                continue
            if Q == q and P != p and P % p == 0 and in_domain(P // p, d):
                k = P // p
                yield _stmt("QuotientOf", Hbar(p, q, d, (k,)), Hbar(P, q, d)), (), {}
            if P == p and Q != q and Q % q == 0 and in_domain(Q // q, d):
                k = Q // q
                yield _stmt("QuotientOf", Hbar(p, q, d, (k,)), Hbar(p, Q, d)), (), {}


def check_r9(st, prem, deriv):
    if st.kind != "QuotientOf" or prem:
        return False
    a, b = st.args
    if a.variant != "Hbar" or b.variant != "Hbar" or b.quotient_by or len(a.quotient_by) != 1:
        return False
    (k,) = a.quotient_by
    if k == 1 or a.domain != b.domain or not in_domain(k, a.domain):
        return False
    return (a.p * k, a.q) == (b.p, b.q) or (a.p, a.q * k) == (b.p, b.q)


# --- R10 --------------------------------------------------------------------

def fire_r10(snap):
    for x, a, b, f1, f2 in snap.r4_pairs():
        yield (_stmt("Isomorphic", Hbar(a.p, a.q, a.domain, (x,)), Hbar(b.p, b.q, b.domain, (x,))),
               (f1, f2), {})


def check_r10(st, prem, deriv):
    if st.kind != "Isomorphic" or len(prem) != 2:
        return False
    m = _r4_match(*prem)
    if m is None:
        return False
    x, a, b = m
    return set(st.args) == {Hbar(a.p, a.q, a.domain, (x,)), Hbar(b.p, b.q, b.domain, (x,))}


# --- R11 --------------------------------------------------------------------

def fire_r11(snap):
    for f in snap.of("OrderAtLeast"):
        g, n = f.statement.args
        if _plain_h(g):
            yield _stmt("ClassLowerBound", SeqRef(g.p, g.q, g.domain), n), (f,), {}


def check_r11(st, prem, deriv):
    if st.kind != "ClassLowerBound" or len(prem) != 1 or prem[0].kind != "OrderAtLeast":
        return False
    g, n = prem[0].args
    s, m = st.args
    return _plain_h(g) and s.triple == g.triple and m == n


# --- R12 --------------------------------------------------------------------

def _single_class_trivials(s):
    p, Q, d = s.triple
    out = [(p, Q)]
    out += [(p, q) for q, _ in integer_roots(Q, d)]
    if p != 0:
        sign = -1 if p < 0 else 1
        for k in divisors(abs(p)):
            out.append((sign * (abs(p) // int(k)), Q))
    seen, uniq = set(), []
    for pq in out:
        if pq not in seen and in_domain(pq[0], d):
            seen.add(pq)
            uniq.append(pq)
    return uniq


def _equiv_index(snap):
    return {(f.statement.args[0].triple, f.statement.args[1]): f for f in snap.of("EquivToOne")}


def fire_r12(snap):
    singles = {f.statement.args[0].triple: f for f in snap.of("SingleClass")}
    for f in snap.of("SingleClass"):
        (s,) = f.statement.args
        if s.domain == POSITIVE:
            yield _stmt("OrderAtMost", H(s.p, s.q, NONZERO), 3), (f,), {}
        for p, q in _single_class_trivials(s):
            yield _stmt("Trivial", H(p, q, s.domain)), (f,), {}
    equiv = _equiv_index(snap)
    for ((p, q, d), x), e1 in sorted(equiv.items(), key=lambda kv: kv[1].id):
        if x == 1:
            continue
        e2 = equiv.get(((p, q * x, d), x))
        if e2 is None:
            continue
        s1 = singles.get((p, q, d))
        if s1 is not None:
            yield _stmt("Trivial", H(p, q * x, d)), (e1, e2, s1), {}
        s2 = singles.get((p, q * x, d))
        if s2 is not None:
            yield _stmt("Trivial", H(p, q, d)), (e1, e2, s2), {}


def check_r12(st, prem, deriv):
    if len(prem) == 1 and prem[0].kind == "SingleClass":
        (s,) = prem[0].args
        if st.kind == "OrderAtMost":
            g, n = st.args
            return (s.domain == POSITIVE and _plain_h(g) and g.triple == (s.p, s.q, NONZERO)
                    and n == 3)
        if st.kind == "Trivial":
            (g,) = st.args
            if not _plain_h(g) or g.domain != s.domain:
                return False
            by_power = g.p == s.p and power_exponent(s.q, g.q) is not None
            by_divisor = (g.q == s.q and g.p != 0 and s.p % g.p == 0
                          and s.p // g.p >= 1)
            return by_power or by_divisor or (g.p, g.q) == (s.p, s.q)
        return False
    if len(prem) == 3 and st.kind == "Trivial":
        e1, e2, sc = prem
        if e1.kind != "EquivToOne" or e2.kind != "EquivToOne" or sc.kind != "SingleClass":
            return False
        (s1, x), (s2, y) = e1.args, e2.args
        if x != y or x == 1 or s2.triple != (s1.p, s1.q * x, s1.domain):
            return False
        (g,) = st.args
        (single,) = sc.args
        if not _plain_h(g):
            return False
        if single.triple == s1.triple:
            return g.triple == s2.triple
        if single.triple == s2.triple:
            return g.triple == s1.triple
    return False


# --- R13 --------------------------------------------------------------------

def fire_r13(snap):
    groups = defaultdict(list)
    for f in snap.of("KernelMember"):
        x, g = f.statement.args
        if _plain_h(g) and f.rule != "R13":
            groups[g].append(f)
    for g in sorted(groups):
        fs = sorted(groups[g], key=lambda f: f.statement.args[0])
        for i, fa in enumerate(fs):
            for fb in fs[i + 1:]:
                a, b = fa.statement.args[0], fb.statement.args[0]
                if a == b:
                    continue
                ka, kb = fa.derivation.kernel, fb.derivation.kernel
                extra = {"kernel": ka.plus(kb)} if ka is not None and kb is not None else {}
                yield _stmt("KernelMember", a * b, g), (fa, fb), extra


def check_r13(st, prem, deriv, premise_facts=None):
    if st.kind != "KernelMember" or len(prem) != 2:
        return False
    if prem[0].kind != "KernelMember" or prem[1].kind != "KernelMember":
        return False
    (a, ga), (b, gb) = prem[0].args, prem[1].args
    x, g = st.args
    if not (ga == gb == g and _plain_h(g) and x == a * b):
        return False
    if deriv is not None and deriv.kernel is not None:
        if premise_facts is None:
            return False
        ka, kb = (f.derivation.kernel for f in premise_facts)
        if ka is None or kb is None:
            return False
        summed = ka.plus(kb)
        return summed.coefficient_map() == deriv.kernel.coefficient_map() and deriv.kernel.replay()
    return True


# --- R14 --------------------------------------------------------------------

def fire_r14(snap):
    for f in snap.of("KernelIsAllOfF"):
        (g,) = f.statement.args
        if not _plain_h(g):
            continue
        for (p, q, d), (_, Q, _) in snap.powers():
            if (p, q, d) == g.triple:
                yield _stmt("KernelIsAllOfF", H(p, Q, d)), (f,), {}
    singles = {f.statement.args[0].triple: f for f in snap.of("SingleClass")}
    for x, a, b, f1, f2 in snap.r4_pairs():
        sb = singles.get(b.triple)
        if sb is not None:
            yield _stmt("NotEquivToOneImpliesDivides", SeqRef(*a.triple), x), (f1, f2, sb), {}
        sa = singles.get(a.triple)
        if sa is not None:
            yield _stmt("NotEquivToOneImpliesDivides", SeqRef(*b.triple), x), (f1, f2, sa), {}


def check_r14(st, prem, deriv):
    if st.kind == "KernelIsAllOfF":
        if len(prem) != 1 or prem[0].kind != "KernelIsAllOfF":
            return False
        (a,), (b,) = prem[0].args, st.args
        return (_plain_h(a) and _plain_h(b) and a.p == b.p and a.domain == b.domain
                and power_exponent(b.q, a.q) is not None)
    if st.kind == "NotEquivToOneImpliesDivides" and len(prem) == 3:
        m = _r4_match(prem[0], prem[1])
        if m is None or prem[2].kind != "SingleClass":
            return False
        x, a, b = m
        s, y = st.args
        (single,) = prem[2].args
        if y != x:
            return False
        if single.triple == b.triple:
            return s.triple == a.triple
        if single.triple == a.triple:
            return s.triple == b.triple
    return False


_FIRE = {
    "R1": fire_r1, "R2": fire_r2, "R3": fire_r3, "R4": fire_r4, "R5": fire_r5,
    "R6": fire_r6, "R7": fire_r7, "R8": fire_r8, "R9": fire_r9, "R10": fire_r10,
    "R11": fire_r11, "R12": fire_r12, "R13": fire_r13, "R14": fire_r14,
}
_CHECK = {
    "R1": check_r1, "R2": check_r2, "R3": check_r3, "R4": check_r4, "R5": check_r5,
    "R6": check_r6, "R7": check_r7, "R8": check_r8, "R9": check_r9, "R10": check_r10,
    "R11": check_r11, "R12": check_r12, "R13": check_r13, "R14": check_r14,
}


def fire(rule, snap):
    """Conclusions of one rule as ``(statement, premise_facts, extras)``."""
    return list(_FIRE[rule](snap))


def check(rule, statement, premise_facts, derivation=None):
    """True iff ``statement`` follows from the premises under ``rule``."""
    fn = _CHECK.get(rule)
    if fn is None:
        return False
    prem = [f.statement for f in premise_facts]
    if rule == "R13":
        return fn(statement, prem, derivation, premise_facts)
    return fn(statement, prem, derivation)
