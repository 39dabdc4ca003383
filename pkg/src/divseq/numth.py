"""Exact integer arithmetic and exponent vectors over a growing prime basis.

Elements of the free abelian group F (positive rationals, or nonzero
rationals when a sign generator is present) are stored as sparse
exponent vectors keyed by *basis index*.  The basis is append-only, so an
index handed out once stays valid for the rest of the session.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import sympy

from .errors import BasisExceeded, BasisMismatch, NegativeWithoutSign, ZeroInput

__all__ = [
    "sieve_primes",
    "PrimeBasis",
    "ExponentVector",
    "factor",
    "factorize",
    "unfactor",
    "vec_add",
    "vec_sub",
    "vec_neg",
    "vec_scale",
]

_SMALL_BOUND = 1000


def sieve_primes(bound):
    """Return the primes ``<= bound`` in ascending order."""
    if bound < 2:
        return []
    flags = bytearray([1]) * (bound + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(bound) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, bound + 1, i)))
    return [i for i, f in enumerate(flags) if f]


_SMALL_PRIMES = sieve_primes(_SMALL_BOUND)


@lru_cache(maxsize=1 << 18)
def _factorize_positive(m):
    # Returns a tuple of (prime, exponent) pairs sorted by prime.
    out = {}
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1 and (m < _SMALL_BOUND * _SMALL_BOUND or sympy.isprime(m)):
        out[m] = out.get(m, 0) + 1
        m = 1
    if m > 1:
        # composite cofactor with no prime below 1000: Pollard rho and friends
        for p, e in sympy.factorint(m).items():
            out[p] = out.get(p, 0) + e
    return tuple(sorted(out.items()))


def factorize(n):
    """Prime factorization of ``|n|`` as a ``{prime: exponent}`` dict.

    The result is verified by multiplication before it is returned.
    """
    if n == 0:
        raise ZeroInput("cannot factor zero")
    m = abs(n)
    pairs = _factorize_positive(m)
    check = 1
    for p, e in pairs:
        check *= p**e
    if check != m:  # pragma: no cover - defensive
        raise ArithmeticError(f"factorization of {m} failed verification")
    return dict(pairs)


class PrimeBasis:
    """Append-only list of primes, optionally with an order-2 sign slot.

    Primes keep the index at which they were first added.  When built from
    a bound the list is sorted; adaptive extension appends in discovery
    order, so later entries need not be larger than earlier ones.

    Reads are lock-free; :meth:`extend` takes a lock.
    """

    def __init__(self, primes=(), includes_sign=False):
        self._primes = []
        self._index = {}
        self._lock = threading.Lock()
        self.includes_sign = bool(includes_sign)
        for p in primes:
            self.extend(p)

    @classmethod
    def up_to(cls, bound, includes_sign=False):
        return cls(sieve_primes(bound), includes_sign=includes_sign)

    @property
    def primes(self):
        return tuple(self._primes)

    @property
    def offset(self):
        """Column of prime index 0 in dense/sparse lattice coordinates."""
        return 1 if self.includes_sign else 0

    @property
    def width(self):
        return len(self._primes) + self.offset

    def __len__(self):
        return len(self._primes)

    def __contains__(self, p):
        return p in self._index

    def __repr__(self):
        return f"PrimeBasis({self._primes!r}, includes_sign={self.includes_sign})"

    def index(self, p):
        return self._index.get(p)

    def prime(self, i):
        return self._primes[i]

    def extend(self, p):
        """Add prime ``p`` if absent and return its index."""
        i = self._index.get(p)
        if i is not None:
            return i
        with self._lock:
            i = self._index.get(p)
            if i is None:
                i = len(self._primes)
                self._primes.append(p)
                self._index[p] = i
            return i


@dataclass(frozen=True)
class ExponentVector:
    """Element of F as a sign bit plus sparse exponents over basis indices.

    ``entries`` is a sorted tuple of ``(index, exponent)`` with no zero
    exponents.  Equality ignores the basis reference; arithmetic checks it.
    """

    entries: tuple = ()
    sign: int = 0
    basis: PrimeBasis | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sign", self.sign % 2)

    @classmethod
    def from_dict(cls, exps, sign=0, basis=None):
        entries = tuple(sorted((i, e) for i, e in exps.items() if e))
        return cls(entries, sign, basis)

    @classmethod
    def identity(cls, basis=None):
        return cls((), 0, basis)

    def as_dict(self):
        return dict(self.entries)

    def by_prime(self):
        """Exponents keyed by prime rather than basis index."""
        if self.basis is None:
            raise BasisMismatch("vector has no basis attached")
        return {self.basis.prime(i): e for i, e in self.entries}

    def is_identity(self):
        return not self.entries and not self.sign

    def max_index(self):
        return self.entries[-1][0] if self.entries else -1

    def columns(self):
        """Sparse lattice coordinates: sign at column 0 when present."""
        off = 1 if (self.basis is not None and self.basis.includes_sign) else 0
        cols = {i + off: e for i, e in self.entries}
        if self.sign:
            cols[0] = 1
        return cols

    def __add__(self, other):
        return vec_add(self, other)

    def __sub__(self, other):
        return vec_sub(self, other)

    def __neg__(self):
        return vec_neg(self)

    def __mul__(self, k):
        return vec_scale(self, k)

    __rmul__ = __mul__

    def __str__(self):
        if self.basis is not None:
            body = ", ".join(f"{p}:{e}" for p, e in self.by_prime().items())
        else:
            body = ", ".join(f"#{i}:{e}" for i, e in self.entries)
        return f"(sign={self.sign}, {{{body}}})" if self.sign else f"{{{body}}}"


def _common_basis(a, b):
    if a.basis is not None and b.basis is not None and a.basis is not b.basis:
        raise BasisMismatch("vectors belong to different prime bases")
    return a.basis if a.basis is not None else b.basis


def _combine(a, b, k):
    out = dict(a.entries)
    for i, e in b.entries:
        v = out.get(i, 0) + k * e
        if v:
            out[i] = v
        else:
            out.pop(i, None)
    return out


def vec_add(a, b):
    basis = _common_basis(a, b)
    return ExponentVector.from_dict(_combine(a, b, 1), a.sign + b.sign, basis)


def vec_sub(a, b):
    basis = _common_basis(a, b)
    return ExponentVector.from_dict(_combine(a, b, -1), a.sign + b.sign, basis)


def vec_neg(a):
    return ExponentVector(tuple((i, -e) for i, e in a.entries), a.sign, a.basis)


def vec_scale(a, k):
    if k == 0:
        return ExponentVector.identity(a.basis)
    return ExponentVector(tuple((i, k * e) for i, e in a.entries), a.sign * k, a.basis)


def factor(n, basis, allow_extend=True):
    """Embed the nonzero integer ``n`` into F as an exponent vector.

    With ``allow_extend`` new primes are appended to ``basis``; otherwise
    any prime outside the basis raises :class:`BasisExceeded` carrying the
    leftover cofactor.
    """
    if n == 0:
        raise ZeroInput("cannot factor zero")
    if n < 0 and not basis.includes_sign:
        raise NegativeWithoutSign(f"{n} is negative but the basis has no sign slot")
    exps = {}
    leftover = 1
    for p, e in factorize(n).items():
        i = basis.extend(p) if allow_extend else basis.index(p)
        if i is None:
            leftover *= p**e
        else:
            exps[i] = e
    if leftover != 1:
        raise BasisExceeded(leftover)
    return ExponentVector.from_dict(exps, 1 if n < 0 else 0, basis)


def unfactor(v, basis=None):
    """Inverse of :func:`factor`; returns an exact :class:`Fraction`."""
    basis = basis if basis is not None else v.basis
    num, den = 1, 1
    for i, e in v.entries:
        p = basis.prime(i)
        if e > 0:
            num *= p**e
        else:
            den *= p ** (-e)
    if v.sign:
        num = -num
    return Fraction(num, den)
