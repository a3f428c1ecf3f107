"""Exact arithmetic in Q(zeta_N)[delta] / (delta^2 - n).

``delta`` plays the role of the loop parameter ``d = sqrt(n)`` where ``n`` is
the order of the group in play.  Elements are stored unreduced modulo
``x^N - 1`` (cheap multiplication of monomials) and brought to a canonical
normal form modulo the N-th cyclotomic polynomial whenever equality, hashing
or serialization needs one.

>>> R = CyclotomicRing(4, 2)
>>> R.zeta(1) * R.zeta(1) == -1
True
>>> R.delta * R.delta == 2
True
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from gmpy2 import mpq as _Q

__all__ = ["CyclotomicRing", "Scalar", "ring_for", "cyclotomic_polynomial"]


def _poly_divmod_monic(num: list, den: list) -> tuple[list, list]:
    """Divide ``num`` by the monic ``den`` (coefficient lists, low degree first)."""
    num = list(num)
    dn = len(den) - 1
    if len(num) - 1 < dn:
        return [], num
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            quot[i - dn] = c
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
    return quot, num[:dn]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients (low degree first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for m in range(1, n):
        if n % m == 0:
            poly, rem = _poly_divmod_monic(poly, list(cyclotomic_polynomial(m)))
            assert not any(rem)
    return tuple(poly)


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (r, m) with n = r^2 * m and m squarefree."""
    r, m, p = 1, 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        r *= p ** (e // 2)
        if e % 2:
            m *= p
        p += 1
    return r, m * n


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class CyclotomicRing:
    """The ring Q(zeta_N)[delta]/(delta^2 - order).

    Instances are interned: ``CyclotomicRing(8, 2) is CyclotomicRing(8, 2)``.
    """

    _cache: dict[tuple[int, int], "CyclotomicRing"] = {}

    def __new__(cls, conductor: int, order: int = 1):
        key = (int(conductor), int(order))
        ring = cls._cache.get(key)
        if ring is None:
            if key[0] < 1 or key[1] < 1:
                raise ValueError(f"conductor and order must be positive, got {key}")
            ring = super().__new__(cls)
            ring._setup(*key)
            cls._cache[key] = ring
        return ring

    def __getnewargs__(self):
        return (self.N, self.order)

    def _setup(self, N: int, order: int) -> None:
        self.N = N
        self.order = order
        self.phi = list(cyclotomic_polynomial(N))
        self.degree = len(self.phi) - 1
        self._zeta_nf: dict[int, tuple] | None = None
        self.delta_in_field: list | None = None
        self.delta_in_field = self._sqrt_in_field(order)

    def _sqrt_in_field(self, n: int) -> list | None:
        """Coefficients of +sqrt(n) in Q(zeta_N) reduced mod Phi_N, or None."""
        r, m = _squarefree_split(n)
        N = self.N
        # element as dict exponent -> Fraction (mod x^N - 1)
        elem = {0: _Q(r)}
        for p in _prime_factors(m):
            if p == 2:
                if N % 8:
                    return None
                s = {N // 8: _Q(1), 7 * N // 8: _Q(1)}
            else:
                if N % p or N % 4:
                    return None
                step = N // p
                gauss = {}
                for a in range(1, p):
                    leg = pow(a, (p - 1) // 2, p)
                    gauss[(a * step) % N] = _Q(1 if leg == 1 else -1)
                if p % 4 == 1:
                    s = gauss
                else:
                    # sqrt(p) = -i * g
                    s = {(k + N // 4) % N: -c for k, c in gauss.items()}
            elem = _mul_dicts(elem, s, N)
        red = self._reduce_dict(elem)
        val = sum(float(c) * cmath.exp(2j * math.pi * k / N) for k, c in enumerate(red))
        if val.real < 0:
            red = [-c for c in red]
        sq = self._reduce_dict(_mul_dicts(dict(enumerate(red)), dict(enumerate(red)), N))
        if sq != [_Q(n)] + [_Q(0)] * (self.degree - 1):
            raise ArithmeticError(f"square root construction failed for {n} in Q(zeta_{N})")
        return red

    def _reduce_dict(self, d: dict) -> list:
        poly = [_Q(0)] * max(self.N, 1)
        for k, c in d.items():
            poly[k % self.N] += c
        _, rem = _poly_divmod_monic(poly, self.phi)
        rem = list(rem) + [_Q(0)] * (self.degree - len(rem))
        return [_Q(c) for c in rem]

    # constructors -------------------------------------------------------
    def __call__(self, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value.lift_to(self)
        return Scalar(self, {0: _Q(value)} if value else {})

    @property
    def zero(self) -> "Scalar":
        return Scalar(self, {})

    @property
    def one(self) -> "Scalar":
        return Scalar(self, {0: _Q(1)})

    def zeta(self, k: int = 1) -> "Scalar":
        return Scalar(self, {k % self.N: _Q(1)})

    @property
    def delta(self) -> "Scalar":
        return Scalar(self, {self.N: _Q(1)})

    def delta_power(self, e: int) -> "Scalar":
        """``delta**e`` for any integer ``e``, computed without division."""
        q, r = divmod(e, 2)
        coeff = _Q(self.order) ** q
        return Scalar(self, {self.N * r: coeff})

    def zeta_exponent_table(self) -> dict[tuple, int]:
        if self._zeta_nf is None:
            self._zeta_nf = {self.zeta(k).normal_form(): k for k in range(self.N)}
        return self._zeta_nf

    def __repr__(self) -> str:
        return f"CyclotomicRing(N={self.N}, order={self.order})"


def ring_for(exponent: int, order: int) -> CyclotomicRing:
    """Ring with conductor lcm(exponent, 4) housing sqrt(order)."""
    return CyclotomicRing(math.lcm(max(exponent, 1), 4), order)


def _mul_dicts(a: dict, b: dict, N: int) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = (ka + kb) % N
            out[k] = out.get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def _mul_into(out: dict, ta: dict, tb: dict, ring: "CyclotomicRing") -> None:
    N = ring.N
    n = ring.order
    for ka, ca in ta.items():
        ea = ka >= N
        ra = ka - N if ea else ka
        for kb, cb in tb.items():
            eb = kb >= N
            k = ra + (kb - N if eb else kb)
            if k >= N:
                k -= N
            c = ca * cb
            if ea and eb:
                c *= n
            elif ea or eb:
                k += N
            out[k] = out.get(k, 0) + c


class Scalar:
    """An element sum c_{k,e} zeta^k delta^e of a :class:`CyclotomicRing`.

    Keys of ``terms`` encode ``(k, e)`` as ``k + N*e``.
    """

    __slots__ = ("ring", "terms", "_nf")

    def __init__(self, ring: CyclotomicRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._nf = None

    # conversion ---------------------------------------------------------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.ring is self.ring:
                return other
            return other.lift_to(self.ring)
        if isinstance(other, (int, Rational)):
            return Scalar(self.ring, {0: _Q(other)} if other else {})
        return NotImplemented

    def _common(self, other):
        if isinstance(other, Scalar) and other.ring is not self.ring:
            ring = _common_ring(self.ring, other.ring, self, other)
            return self.lift_to(ring), other.lift_to(ring)
        o = self._coerce(other)
        if o is NotImplemented:
            return None
        return self, o

    def has_delta(self) -> bool:
        N = self.ring.N
        return any(k >= N for k in self.terms)

    def lift_to(self, ring: CyclotomicRing) -> "Scalar":
        """Embed into a ring whose conductor is a multiple of ours."""
        if ring is self.ring:
            return self
        src = self.ring
        if ring.N % src.N:
            raise ValueError(f"cannot embed Q(zeta_{src.N}) into Q(zeta_{ring.N})")
        if ring.order != src.order and self.has_delta():
            raise ValueError(
                f"delta^2={src.order} element cannot move to a ring with delta^2={ring.order}"
            )
        f = ring.N // src.N
        terms = {}
        for key, c in self.terms.items():
            e, k = divmod(key, src.N)
            terms[k * f + e * ring.N] = c
        return Scalar(ring, terms)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        out = dict(a.terms)
        for k, c in b.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Scalar(a.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, Scalar):
            if not other:
                return Scalar(self.ring, {})
            return Scalar(self.ring, {k: c * other for k, c in self.terms.items()})
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        out: dict = {}
        _mul_into(out, a.terms, b.terms, a.ring)
        return Scalar(a.ring, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def mul_add(self, acc: dict, other: "Scalar") -> None:
        """Add ``self * other`` into the raw term dict ``acc`` (same ring)."""
        if other.ring is not self.ring:
            other = self._coerce(other)
        _mul_into(acc, self.terms, other.terms, self.ring)

    def inverse(self) -> "Scalar":
        ring = self.ring
        if self.is_zero():
            raise ZeroDivisionError("division by zero Scalar")
        p0, p1 = self._split_nf()
        if ring.delta_in_field is not None or not any(p1):
            inv = _field_inverse(p0, ring)
            return Scalar(ring, {k: c for k, c in enumerate(inv) if c})
        a = Scalar(ring, {k: c for k, c in enumerate(p0) if c})
        b = Scalar(ring, {k: c for k, c in enumerate(p1) if c})
        norm = a * a - b * b * ring.order
        conj = a - b * ring.delta
        return conj * norm.inverse()

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, Scalar):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self * (_Q(1) / _Q(other))
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        acc = self.ring.one
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def conjugate(self) -> "Scalar":
        """Complex conjugation: zeta -> zeta^-1, delta fixed."""
        N = self.ring.N
        out = {}
        for key, c in self.terms.items():
            e, k = divmod(key, N)
            out[(-k) % N + e * N] = c
        return Scalar(self.ring, out)

    # normal form --------------------------------------------------------
    def _split_nf(self) -> tuple[list, list]:
        ring = self.ring
        N = ring.N
        d0, d1 = {}, {}
        for key, c in self.terms.items():
            if key >= N:
                d1[key - N] = c
            else:
                d0[key] = c
        p0 = ring._reduce_dict(d0)
        p1 = ring._reduce_dict(d1)
        s = ring.delta_in_field
        if s is not None and any(p1):
            prod = _mul_dicts(dict(enumerate(p1)), dict(enumerate(s)), N)
            extra = ring._reduce_dict(prod)
            p0 = [x + y for x, y in zip(p0, extra)]
            p1 = [_Q(0)] * ring.degree
        return p0, p1

    def normal_form(self) -> tuple:
        if self._nf is None:
            p0, p1 = self._split_nf()
            self._nf = tuple(p0) + tuple(p1)
        return self._nf

    def is_zero(self) -> bool:
        if not self.terms:
            return True
        return not any(self.normal_form())

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Scalar, int, Rational)):
            return NotImplemented
        if isinstance(other, Scalar) and other.ring is self.ring:
            return other.terms == self.terms or other.normal_form() == self.normal_form()
        try:
            diff = self - other
        except ValueError:
            return False
        return diff.is_zero()

    def __ne__(self, other) -> bool:
        res = self.__eq__(other)
        return res if res is NotImplemented else not res

    def __hash__(self) -> int:
        nf = self.normal_form()
        if not any(nf[1:]):
            return hash(nf[0])
        return hash((self.ring.N, self.ring.order, nf))

    def is_rational(self) -> bool:
        nf = self.normal_form()
        return not any(nf[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        c = self.normal_form()[0]
        return Fraction(int(c.numerator), int(c.denominator))

    def root_of_unity_exponent(self) -> int | None:
        """Return k if this element equals zeta_N^k, else None."""
        return self.ring.zeta_exponent_table().get(self.normal_form())

    # numerics / io ------------------------------------------------------
    def to_complex(self) -> complex:
        ring = self.ring
        N = ring.N
        root = math.sqrt(ring.order)
        total = 0j
        for key, c in self.terms.items():
            e, k = divmod(key, N)
            total += float(c) * cmath.exp(2j * math.pi * k / N) * (root if e else 1.0)
        return total

    def to_json(self) -> dict:
        nf = self.normal_form()
        deg = self.ring.degree
        terms = []
        for idx, c in enumerate(nf):
            if c:
                e, k = divmod(idx, deg)
                terms.append([k, e, int(c.numerator), int(c.denominator)])
        return {"N": self.ring.N, "order": self.ring.order, "terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "Scalar":
        ring = CyclotomicRing(int(data["N"]), int(data["order"]))
        terms: dict = {}
        for k, e, num, den in data["terms"]:
            if e not in (0, 1) or not 0 <= k < ring.N:
                raise ValueError(f"bad term {(k, e)} for N={ring.N}")
            key = k + ring.N * e
            terms[key] = terms.get(key, 0) + _Q(num, den)
        return cls(ring, {k: c for k, c in terms.items() if c})

    def __repr__(self) -> str:
        nf = self.normal_form()
        deg = self.ring.degree
        parts = []
        for idx, c in enumerate(nf):
            if not c:
                continue
            e, k = divmod(idx, deg)
            mono = "*".join(
                s for s in (f"z{self.ring.N}^{k}" if k else "", "d" if e else "") if s
            )
            parts.append(f"{c}*{mono}" if mono and c != 1 else (mono or str(c)))
        return " + ".join(parts) if parts else "0"


def _common_ring(r1: CyclotomicRing, r2: CyclotomicRing, a: Scalar, b: Scalar) -> CyclotomicRing:
    N = math.lcm(r1.N, r2.N)
    if r1.order == r2.order:
        return CyclotomicRing(N, r1.order)
    if not a.has_delta():
        return CyclotomicRing(N, r2.order)
    if not b.has_delta():
        return CyclotomicRing(N, r1.order)
    raise ValueError(f"incompatible delta^2 values {r1.order} and {r2.order}")


def _field_inverse(p: list, ring: CyclotomicRing) -> list:
    """Inverse of a nonzero element of Q(zeta_N) via extended Euclid against Phi_N."""
    def trim(q):
        q = list(q)
        while q and not q[-1]:
            q.pop()
        return q

    def sub(a, b):
        n = max(len(a), len(b))
        a = a + [0] * (n - len(a))
        b = b + [0] * (n - len(b))
        return trim([x - y for x, y in zip(a, b)])

    def mul(a, b):
        if not a or not b:
            return []
        out = [_Q(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return trim(out)

    def divmod_(a, b):
        a = list(a)
        q = [_Q(0)] * max(len(a) - len(b) + 1, 0)
        lead = b[-1]
        while len(a) >= len(b) and a:
            c = a[-1] / lead
            shift = len(a) - len(b)
            q[shift] = c
            for j, y in enumerate(b):
                a[shift + j] -= c * y
            a = trim(a)
        return trim(q), a

    r0, r1 = [_Q(c) for c in ring.phi], trim(p)
    s0, s1 = [], [_Q(1)]
    while r1:
        q, r = divmod_(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
    # r0 is a nonzero constant gcd
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible")
    inv = [c / r0[0] for c in s0]
    inv = ring._reduce_dict(dict(enumerate(inv)))
    return inv
