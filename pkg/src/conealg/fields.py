"""Exact scalar arithmetic: finite fields, rational functions, truncated jets.

Every scalar context in this package is a small object exposing arithmetic
on *raw* values (plain ints for GF(2^k) and GF(p), coefficient tuples for
GF(p^k), pairs of coefficient tuples for rational functions, exponent
dictionaries for jets).  Hot loops call the context methods directly; there
is no per-element wrapper object.

Fixed irreducible moduli (bit-exact reproducibility; verified by the
Frobenius criterion in the test suite):

    GF(2)      x + 1
    GF(2^32)   x^32 + x^7 + x^3 + x^2 + 1
    GF(2^64)   x^64 + x^4 + x^3 + x + 1
    GF(2^128)  x^128 + x^7 + x^2 + x + 1
    GF(3^32)   x^32 + x^5 + 2
    GF(5^32)   x^32 + x^16 + 2

GF(3) and GF(5) are plain prime fields.
"""

from __future__ import annotations

import hashlib
import random
from typing import Iterable

__all__ = [
    "BinaryField",
    "ExtensionField",
    "FieldError",
    "JetContext",
    "PrimeField",
    "RationalFunctionField",
    "field",
    "substream",
]


class FieldError(ValueError):
    pass


def substream(seed: int, *tags) -> random.Random:
    """Deterministic child RNG derived from a 64-bit seed and a tag path."""
    h = hashlib.sha256(repr((seed,) + tags).encode()).digest()
    return random.Random(int.from_bytes(h[:8], "big"))


# ---------------------------------------------------------------------------
# Finite fields
# ---------------------------------------------------------------------------

# Feedback part of the modulus, i.e. f(x) - x^k, encoded as a bit polynomial.
_BINARY_FEEDBACK = {
    1: 0b1,
    32: (1 << 7) | (1 << 3) | (1 << 2) | 1,
    64: (1 << 4) | (1 << 3) | (1 << 1) | 1,
    128: (1 << 7) | (1 << 2) | (1 << 1) | 1,
}

# (p, k) -> modulus coefficient tuple, low to high, length k (monic part
# implied).  x^32 + x^5 + 2 is stored as (2, 0, 0, 0, 0, 1, 0, ..., 0).
_EXTENSION_MODULI = {
    (3, 32): (2,) + (0,) * 4 + (1,) + (0,) * 26,
    (5, 32): (2,) + (0,) * 15 + (1,) + (0,) * 15,
}


class _Scalars:
    """Shared helpers; concrete contexts define the core operations."""

    characteristic: int

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def is_unit(self, a) -> bool:
        return a != self.zero

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        r = self.one
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def dot(self, xs, ys):
        acc = self.zero
        for x, y in zip(xs, ys):
            acc = self.add(acc, self.mul(x, y))
        return acc


class BinaryField(_Scalars):
    """GF(2^k) with elements as ints interpreted as bit polynomials."""

    def __init__(self, k: int):
        if k not in _BINARY_FEEDBACK:
            raise FieldError(f"unsupported binary field degree {k}")
        self.characteristic = 2
        self.degree = k
        self.order = 1 << k
        self.feedback = _BINARY_FEEDBACK[k]
        self.modulus = (1 << k) | self.feedback
        self.zero = 0
        self.one = 1
        self._mask = self.order - 1

    def describe(self) -> str:
        return f"GF(2^{self.degree})/0x{self.modulus:x}"

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def neg(self, a: int) -> int:
        return a

    def sub(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        k = self.degree
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> k:
                a ^= self.modulus
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.order - 2)

    def sample(self, rng: random.Random) -> int:
        return rng.getrandbits(self.degree)

    def from_int(self, n: int) -> int:
        return n & 1

    def to_json(self, a: int) -> str:
        return format(a, "x")


class PrimeField(_Scalars):
    """GF(p) with elements as ints in [0, p)."""

    def __init__(self, p: int):
        self.characteristic = p
        self.degree = 1
        self.order = p
        self.zero = 0
        self.one = 1 % p

    def describe(self) -> str:
        return f"GF({self.order})"

    def add(self, a, b):
        return (a + b) % self.order

    def neg(self, a):
        return (-a) % self.order

    def mul(self, a, b):
        return (a * b) % self.order

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.order - 2, self.order)

    def sample(self, rng: random.Random):
        return rng.randrange(self.order)

    def from_int(self, n: int):
        return n % self.order

    def to_json(self, a):
        return int(a)


class ExtensionField(_Scalars):
    """GF(p^k) in a fixed polynomial basis; elements are length-k tuples.

    Multiplication packs coefficients into a big int with 16-bit slots so
    the convolution is a single integer multiply (Kronecker substitution),
    then reduces slot-wise mod p and polynomial-wise by the modulus.
    """

    def __init__(self, p: int, k: int):
        if (p, k) not in _EXTENSION_MODULI:
            raise FieldError(f"unsupported extension field GF({p}^{k})")
        self.characteristic = p
        self.degree = k
        self.order = p**k
        self.modulus_tail = _EXTENSION_MODULI[(p, k)]
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1)
        # slot width check: max convolution coefficient is k*(p-1)^2
        assert k * (p - 1) * (p - 1) < (1 << 16)

    def describe(self) -> str:
        terms = [f"{c}*x^{i}" for i, c in enumerate(self.modulus_tail) if c]
        return f"GF({self.characteristic}^{self.degree})/x^{self.degree}+" + "+".join(reversed(terms))

    def add(self, a, b):
        p = self.characteristic
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.characteristic
        return tuple((-x) % p for x in a)

    def mul(self, a, b):
        p, k = self.characteristic, self.degree
        ai = sum(c << (16 * i) for i, c in enumerate(a))
        bi = sum(c << (16 * i) for i, c in enumerate(b))
        ci = ai * bi
        conv = [(ci >> (16 * i)) & 0xFFFF for i in range(2 * k - 1)]
        tail = self.modulus_tail
        for d in range(2 * k - 2, k - 1, -1):
            c = conv[d] % p
            if c:
                conv[d] = 0
                for i, m in enumerate(tail):
                    if m:
                        conv[d - k + i] -= c * m
        return tuple(c % p for c in conv[:k])

    def inv(self, a):
        # extended Euclid in GF(p)[x] against the modulus
        p, k = self.characteristic, self.degree
        if all(c == 0 for c in a):
            raise ZeroDivisionError("inverse of zero")
        f = list(self.modulus_tail) + [1]
        g = list(a)
        s0, s1 = [0], [1]

        def deg(v):
            d = len(v) - 1
            while d >= 0 and v[d] % p == 0:
                d -= 1
            return d

        r0, r1 = f, g
        while deg(r1) > 0:
            d0, d1 = deg(r0), deg(r1)
            if d0 < d1:
                r0, r1, s0, s1 = r1, r0, s1, s0
                continue
            lead = pow(r1[deg(r1)], p - 2, p)
            while deg(r0) >= deg(r1) and deg(r0) >= 0:
                sh = deg(r0) - deg(r1)
                c = r0[deg(r0)] * lead % p
                for i in range(deg(r1) + 1):
                    r0[sh + i] = (r0[sh + i] - c * r1[i]) % p
                if len(s0) < len(s1) + sh:
                    s0 = s0 + [0] * (len(s1) + sh - len(s0))
                for i in range(len(s1)):
                    s0[sh + i] = (s0[sh + i] - c * s1[i]) % p
            r0, r1, s0, s1 = r1, r0, s1, s0
        d = deg(r1)
        if d != 0:
            raise FieldError("modulus not irreducible or zero input")
        c = pow(r1[0], p - 2, p)
        out = [x * c % p for x in s1]
        out = out[:k] + [0] * max(0, k - len(out))
        return tuple(out[:k])

    def sample(self, rng: random.Random):
        p = self.characteristic
        return tuple(rng.randrange(p) for _ in range(self.degree))

    def from_int(self, n: int):
        return (n % self.characteristic,) + (0,) * (self.degree - 1)

    def to_json(self, a):
        return list(a)


def field(p: int = 2, k: int = 64):
    """Return the fixed-modulus field GF(p^k)."""
    if p == 2:
        return BinaryField(k)
    if k == 1:
        return PrimeField(p)
    return ExtensionField(p, k)


# ---------------------------------------------------------------------------
# Univariate polynomials and rational functions
# ---------------------------------------------------------------------------

def _ptrim(c: tuple) -> tuple:
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return c[:n]


def padd(F, a, b):
    n = max(len(a), len(b))
    a = a + (F.zero,) * (n - len(a))
    b = b + (F.zero,) * (n - len(b))
    return _ptrim(tuple(F.add(x, y) for x, y in zip(a, b)))


def pneg(F, a):
    return tuple(F.neg(x) for x in a)


def pmul(F, a, b):
    if not a or not b:
        return ()
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == F.zero:
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _ptrim(tuple(out))


def pscale(F, a, c):
    return _ptrim(tuple(F.mul(x, c) for x in a))


def pdivmod(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [F.zero] * max(0, len(a) - len(b) + 1)
    r = list(a)
    inv_lead = F.inv(b[-1])
    while len(r) >= len(b) and _ptrim(tuple(r)):
        r = list(_ptrim(tuple(r)))
        if len(r) < len(b):
            break
        c = F.mul(r[-1], inv_lead)
        sh = len(r) - len(b)
        q[sh] = c
        for i, y in enumerate(b):
            r[sh + i] = F.sub(r[sh + i], F.mul(c, y))
    return _ptrim(tuple(q)), _ptrim(tuple(r))


def pgcd(F, a, b):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        _, a = pdivmod(F, a, b)
        a, b = b, a
    if a:
        a = pscale(F, a, F.inv(a[-1]))
    return a


def peval(F, a, x):
    acc = F.zero
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


class RationalFunctionField(_Scalars):
    """Field of univariate rational functions over a finite field.

    Values are (numerator, denominator) coefficient-tuple pairs, kept
    coprime with a monic denominator.  The zero numerator is the empty
    tuple.
    """

    def __init__(self, base, var: str = "t"):
        self.base = base
        self.var = var
        self.characteristic = base.characteristic
        self.zero = ((), (base.one,))
        self.one = ((base.one,), (base.one,))

    def describe(self) -> str:
        return f"{self.base.describe()}({self.var})"

    def make(self, num, den):
        num, den = _ptrim(tuple(num)), _ptrim(tuple(den))
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return self.zero
        g = pgcd(self.base, num, den)
        if len(g) > 1:
            num, _ = pdivmod(self.base, num, g)
            den, _ = pdivmod(self.base, den, g)
        c = self.base.inv(den[-1])
        return pscale(self.base, num, c), pscale(self.base, den, c)

    def constant(self, c):
        return ((c,), (self.base.one,)) if c != self.base.zero else self.zero

    def t(self):
        return ((self.base.zero, self.base.one), (self.base.one,))

    def add(self, a, b):
        (n1, d1), (n2, d2) = a, b
        F = self.base
        return self.make(padd(F, pmul(F, n1, d2), pmul(F, n2, d1)), pmul(F, d1, d2))

    def neg(self, a):
        n, d = a
        return (pneg(self.base, n), d)

    def mul(self, a, b):
        (n1, d1), (n2, d2) = a, b
        F = self.base
        return self.make(pmul(F, n1, n2), pmul(F, d1, d2))

    def inv(self, a):
        n, d = a
        if not n:
            raise ZeroDivisionError("inverse of zero")
        return self.make(d, n)

    def from_int(self, n: int):
        return self.constant(self.base.from_int(n))

    def evaluate(self, a, x):
        """Value at x; the denominator must not vanish there."""
        n, d = a
        dv = peval(self.base, d, x)
        if dv == self.base.zero:
            raise ZeroDivisionError(f"pole at {self.var}={x!r}")
        nv = peval(self.base, n, x)
        return self.base.mul(nv, self.base.inv(dv))

    def has_pole_at_zero(self, a) -> bool:
        _, d = a
        return d[0] == self.base.zero

    def to_json(self, a):
        n, d = a
        return {
            "num": [self.base.to_json(c) for c in n],
            "den": [self.base.to_json(c) for c in d],
        }


# ---------------------------------------------------------------------------
# Truncated jets
# ---------------------------------------------------------------------------

def _factorial_mod(n: int, p: int) -> int:
    r = 1
    for i in range(2, n + 1):
        r = (r * i) % p
    return r


class JetContext(_Scalars):
    """Truncated multivariate power series over a finite field.

    A jet stores the exact mixed Taylor coefficients of a function at a
    point: the coefficient at exponent E is (d_E f)(point) / E!.  Exponents
    beyond the per-variable caps or beyond the optional total-degree cap
    truncate to zero.  Values are dicts {exponent tuple: field raw}, zero
    coefficients omitted, the empty dict is zero.
    """

    def __init__(self, base, variables: tuple, caps, total_cap: int | None = None):
        self.base = base
        self.characteristic = base.characteristic
        self.variables = tuple(variables)
        self.index = {v: i for i, v in enumerate(self.variables)}
        if len(self.index) != len(self.variables):
            raise FieldError("duplicate jet variable tags")
        if isinstance(caps, int):
            caps = (caps,) * len(self.variables)
        self.caps = tuple(caps)
        if any(c < 1 for c in self.caps):
            raise FieldError("jet caps must be >= 1")
        self.total_cap = total_cap if total_cap is not None else sum(self.caps)
        self.zero = {}
        self.one = {(0,) * len(self.variables): base.one}

    def describe(self) -> str:
        return f"jets({self.base.describe()}; {len(self.variables)} vars, caps {self.caps})"

    def eq(self, a, b) -> bool:
        return a == b

    def is_zero(self, a) -> bool:
        return not a

    def lift(self, c, var=None):
        """Constant jet, or first-order seed c + 1*var."""
        out = {}
        if c != self.base.zero:
            out[(0,) * len(self.variables)] = c
        if var is not None:
            if var not in self.index:
                raise FieldError(f"unknown jet variable {var!r}")
            e = [0] * len(self.variables)
            e[self.index[var]] = 1
            out[tuple(e)] = self.base.one
        return out

    def constant_part(self, a):
        return a.get((0,) * len(self.variables), self.base.zero)

    def add(self, a, b):
        if not a:
            return dict(b)
        out = dict(a)
        F = self.base
        for e, c in b.items():
            s = F.add(out.get(e, F.zero), c)
            if s == F.zero:
                out.pop(e, None)
            else:
                out[e] = s
        return out

    def neg(self, a):
        F = self.base
        return {e: F.neg(c) for e, c in a.items()}

    def mul(self, a, b):
        if not a or not b:
            return {}
        F = self.base
        caps, tc = self.caps, self.total_cap
        out: dict = {}
        for e1, c1 in a.items():
            t1 = sum(e1)
            for e2, c2 in b.items():
                if t1 + sum(e2) > tc:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                if any(x > c for x, c in zip(e, caps)):
                    continue
                s = F.add(out.get(e, F.zero), F.mul(c1, c2))
                if s == F.zero:
                    out.pop(e, None)
                else:
                    out[e] = s
        return out

    def is_unit(self, a) -> bool:
        return self.constant_part(a) != self.base.zero

    def inv(self, a):
        c0 = self.constant_part(a)
        if c0 == self.base.zero:
            raise ZeroDivisionError("jet with zero constant term is not invertible")
        F = self.base
        c0i = F.inv(c0)
        zero_e = (0,) * len(self.variables)
        # a = c0 (1 + n), n nilpotent: invert by a geometric series
        n = {e: F.mul(c, c0i) for e, c in a.items() if e != zero_e}
        acc = dict(self.one)
        term = dict(self.one)
        for _ in range(self.total_cap):
            term = self.mul(term, self.neg(n))
            if not term:
                break
            acc = self.add(acc, term)
        return {e: F.mul(c, c0i) for e, c in acc.items()}

    def from_int(self, n: int):
        return self.lift(self.base.from_int(n))

    def partial(self, a, orders) -> object:
        """Mixed partial derivative at the base point: E! * coefficient_E.

        `orders` maps variable tags to derivative orders.  Each order must
        be below the field characteristic so the factorial is invertible.
        """
        e = [0] * len(self.variables)
        for v, o in orders.items():
            if v not in self.index:
                raise FieldError(f"unknown jet variable {v!r}")
            e[self.index[v]] = o
        p = self.characteristic
        fact = 1
        for o in e:
            if o >= p:
                raise FieldError(f"derivative order {o} >= characteristic {p}")
            fact = (fact * _factorial_mod(o, p)) % p
        coeff = a.get(tuple(e), self.base.zero)
        scale = self.base.from_int(fact)
        return self.base.mul(coeff, scale)

    def to_json(self, a):
        return {
            ",".join(map(str, e)): self.base.to_json(c)
            for e, c in sorted(a.items())
        }
