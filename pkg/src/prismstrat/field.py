"""Exact arithmetic in K = Q[pi]/(E(pi)) for an Eisenstein polynomial E.

Elements are vectors of arbitrary-precision rationals in the power basis
1, pi, ..., pi^(e-1), always fully reduced mod E.  The valuation is
normalized by v(pi) = 1, so v(p) = e.  Because E is Eisenstein, the
terms c_i * pi^i of an element have pairwise distinct valuations
e*v_p(c_i) + i (distinct residues mod e), so

    v(sum_i c_i pi^i) = min_i (e*v_p(c_i) + i)

with no cancellation.  This is the primary valuation routine; the norm
form N(a) = det(mult-by-a) gives an independent oracle used in tests.

No floating point anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import DivisionByZero, NotEisenstein, PrimeTooSmall

Rat = Union[int, Fraction, str]

INF = math.inf


def _to_fraction(x: Rat) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rat_str(x: Fraction) -> str:
    """Canonical "num/den" form, plain integer when den == 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def vp_rational(x: Fraction, p: int):
    """p-adic valuation of a rational; INF for 0."""
    if x == 0:
        return INF
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for n < 3.3 * 10^24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FieldDesc:
    """The base field K = Q[pi]/(E(pi)), E Eisenstein at p.

    Precomputes the reduction table pi^k mod E for k < 2e-1 and the
    element beta = E'(pi).  Immutable after construction.
    """

    __slots__ = ("p", "e", "E_coeffs", "_pow_table", "pi", "beta", "one", "zero")

    def __init__(self, p: int, E_coeffs: Sequence[Rat]):
        if not is_prime(p):
            raise PrimeTooSmall(f"p = {p} is not prime")
        if p <= 2:
            raise PrimeTooSmall(f"p = {p}; the engine follows the p > 2 convention")
        coeffs = tuple(_to_fraction(c) for c in E_coeffs)
        if len(coeffs) < 2:
            raise NotEisenstein("E must have degree >= 1")
        e = len(coeffs) - 1
        if coeffs[-1] != 1:
            raise NotEisenstein("E must be monic")
        for i, c in enumerate(coeffs[:-1]):
            if vp_rational(c, p) < 1:
                raise NotEisenstein(
                    f"coefficient of u^{i} has p-adic valuation < 1"
                )
        if vp_rational(coeffs[0], p) != 1:
            raise NotEisenstein("constant coefficient must have p-adic valuation exactly 1")

        self.p = p
        self.e = e
        self.E_coeffs = coeffs

        # pi^k mod E for k = 0 .. 2e-2, as coordinate tuples
        table = []
        cur = [Fraction(0)] * e
        cur[0] = Fraction(1)
        table.append(tuple(cur))
        for _ in range(1, 2 * e - 1):
            shifted = [Fraction(0)] + cur[:]
            if len(shifted) > e:
                top = shifted.pop()
                # pi^e = -(E_0 + E_1 pi + ... + E_{e-1} pi^{e-1})
                for i in range(e):
                    shifted[i] -= top * coeffs[i]
            cur = shifted
            table.append(tuple(cur))
        self._pow_table = tuple(table)

        self.zero = KElem(self, (Fraction(0),) * e)
        self.one = KElem(self, tuple([Fraction(1)] + [Fraction(0)] * (e - 1)))
        pi_coords = [Fraction(0)] * e
        if e == 1:
            pi_coords[0] = -coeffs[0]  # pi = -E_0 for linear E
        else:
            pi_coords[1] = Fraction(1)
        self.pi = KElem(self, tuple(pi_coords))
        self.beta = self.eval_poly(self.E_derivative(1), self.pi)

    def E_derivative(self, n: int) -> tuple[Fraction, ...]:
        """Coefficients of the n-th formal derivative of E, low-to-high."""
        coeffs = list(self.E_coeffs)
        for _ in range(n):
            coeffs = [coeffs[k] * k for k in range(1, len(coeffs))]
        return tuple(coeffs)

    def from_rational(self, x: Rat) -> KElem:
        coords = [Fraction(0)] * self.e
        coords[0] = _to_fraction(x)
        return KElem(self, tuple(coords))

    def from_coords(self, coords: Sequence[Rat]) -> KElem:
        cs = [_to_fraction(c) for c in coords]
        if len(cs) > self.e:
            raise ValueError(f"expected at most {self.e} coordinates")
        cs += [Fraction(0)] * (self.e - len(cs))
        return KElem(self, tuple(cs))

    def eval_poly(self, poly: Sequence[Rat], x: KElem) -> KElem:
        """Evaluate a rational-coefficient polynomial at x in K (Horner)."""
        acc = self.zero
        for c in reversed([_to_fraction(c) for c in poly]):
            acc = acc * x + self.from_rational(c)
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, FieldDesc)
            and self.p == other.p
            and self.E_coeffs == other.E_coeffs
        )

    def __hash__(self):
        return hash((self.p, self.E_coeffs))

    def __repr__(self):
        terms = " + ".join(
            f"({rat_str(c)})u^{i}" for i, c in enumerate(self.E_coeffs) if c != 0
        )
        return f"FieldDesc(p={self.p}, E = {terms})"


def field_init(p: int, E_coeffs: Sequence[Rat]) -> FieldDesc:
    """Validate and build the field description; precomputes beta = E'(pi)."""
    return FieldDesc(p, E_coeffs)


@dataclass(frozen=True, slots=True)
class KElem:
    """Element of K in the power basis, always reduced (len(coords) == e)."""

    field: FieldDesc
    coords: tuple[Fraction, ...]

    def __add__(self, other: KElem) -> KElem:
        return KElem(
            self.field,
            tuple(a + b for a, b in zip(self.coords, other.coords)),
        )

    def __sub__(self, other: KElem) -> KElem:
        return KElem(
            self.field,
            tuple(a - b for a, b in zip(self.coords, other.coords)),
        )

    def __neg__(self) -> KElem:
        return KElem(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other) -> KElem:
        fld = self.field
        if isinstance(other, (int, Fraction)):
            q = _to_fraction(other)
            return KElem(fld, tuple(a * q for a in self.coords))
        if not isinstance(other, KElem):
            return NotImplemented
        e = fld.e
        if e == 1:
            return KElem(fld, (self.coords[0] * other.coords[0],))
        a, b = self.coords, other.coords
        prod = [Fraction(0)] * (2 * e - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj == 0:
                    continue
                prod[i + j] += ai * bj
        out = [Fraction(0)] * e
        table = fld._pow_table
        for k, ck in enumerate(prod):
            if ck == 0:
                continue
            row = table[k]
            for i in range(e):
                if row[i] != 0:
                    out[i] += ck * row[i]
        return KElem(fld, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other) -> KElem:
        if isinstance(other, (int, Fraction)):
            q = _to_fraction(other)
            if q == 0:
                raise DivisionByZero("division by zero")
            return KElem(self.field, tuple(a / q for a in self.coords))
        return self * other.inverse()

    def __pow__(self, n: int) -> KElem:
        if n < 0:
            return self.inverse() ** (-n)
        acc = self.field.one
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def inverse(self) -> KElem:
        """Inverse mod E via extended Euclid over Q[u]."""
        if self.is_zero():
            raise DivisionByZero("inverting 0 in K")
        fld = self.field
        if fld.e == 1:
            return KElem(fld, (1 / self.coords[0],))
        # extended gcd of a(u) and E(u) in Q[u]; E irreducible so gcd is a unit
        r0 = list(fld.E_coeffs)
        r1 = list(self.coords)
        while r1 and r1[-1] == 0:
            r1.pop()
        s0: list[Fraction] = [Fraction(0)]
        s1: list[Fraction] = [Fraction(1)]

        def poly_sub_scaled(a, b, c, shift):
            # a -= c * u^shift * b, in place on a copy
            out = list(a) + [Fraction(0)] * max(0, len(b) + shift - len(a))
            for i, bi in enumerate(b):
                out[i + shift] -= c * bi
            while out and out[-1] == 0:
                out.pop()
            return out

        while len(r1) > 1:
            # divide r0 by r1
            q = [Fraction(0)] * max(len(r0) - len(r1) + 1, 0)
            rem = list(r0)
            while len(rem) >= len(r1):
                c = rem[-1] / r1[-1]
                shift = len(rem) - len(r1)
                q[shift] = c
                rem = poly_sub_scaled(rem, r1, c, shift)
            # s_next = s0 - q * s1
            s_next = list(s0)
            for i, qi in enumerate(q):
                if qi != 0:
                    s_next = poly_sub_scaled(s_next, s1, qi, i)
            r0, r1 = r1, rem
            s0, s1 = s1, s_next
            if not r1:
                break
        if not r1:
            # gcd is r0; for irreducible E this means a was a multiple of E => 0
            raise DivisionByZero("element not invertible mod E")
        # r1 is a nonzero constant; inverse is s1 / r1[0]
        inv_coords = [c / r1[0] for c in s1]
        return fld.from_coords(inv_coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def valuation(self):
        """v with v(pi) = 1, v(p) = e; INF for 0."""
        fld = self.field
        best = INF
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            v = fld.e * vp_rational(c, fld.p) + i
            if v < best:
                best = v
        return best

    def vp(self):
        """p-adic valuation (v / e), rational in general; INF for 0."""
        v = self.valuation()
        if v is INF:
            return INF
        return Fraction(v, self.field.e)

    def norm(self) -> Fraction:
        """Field norm N(a) = det of multiplication-by-a on the power basis."""
        fld = self.field
        e = fld.e
        cols = []
        basis = fld.one
        for k in range(e):
            col = (self * basis).coords
            cols.append(col)
            basis = basis * fld.pi
        # det by fraction-free-ish Gaussian elimination over Q
        m = [[cols[j][i] for j in range(e)] for i in range(e)]
        det = Fraction(1)
        for c in range(e):
            piv = next((r for r in range(c, e) if m[r][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            det *= m[c][c]
            inv = 1 / m[c][c]
            for r in range(c + 1, e):
                f = m[r][c] * inv
                if f:
                    for cc in range(c, e):
                        m[r][cc] -= f * m[c][cc]
        return det

    def to_json(self) -> list[str]:
        return [rat_str(c) for c in self.coords]

    @staticmethod
    def from_json(field: FieldDesc, data) -> KElem:
        if isinstance(data, (str, int)):
            return field.from_rational(data)
        return field.from_coords(list(data))

    def __repr__(self):
        parts = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            if i == 0:
                parts.append(rat_str(c))
            elif i == 1:
                parts.append(f"({rat_str(c)})pi")
            else:
                parts.append(f"({rat_str(c)})pi^{i}")
        return " + ".join(parts) if parts else "0"


def k_valuation(a: KElem):
    """v(a) with v(pi) = 1; v(0) = +inf."""
    return a.valuation()


def k_arith(a: KElem, b: KElem, op: str) -> KElem:
    """Dispatch form of field arithmetic (add/sub/mul/div)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


@dataclass(frozen=True, slots=True)
class PadicApprox:
    """A KElem known modulo p^prec (absolute p-adic precision).

    prec is a Fraction (valuations of K-elements live in (1/e)Z) or INF
    for exact values.  Arithmetic propagates precision pessimistically.
    """

    value: KElem
    prec: object  # Fraction or INF

    @staticmethod
    def exact(value: KElem) -> PadicApprox:
        return PadicApprox(value, INF)

    @staticmethod
    def approx(value: KElem, prec) -> PadicApprox:
        return PadicApprox(value, prec if prec is INF else Fraction(prec))

    def _vp(self):
        return self.value.vp()

    def __add__(self, other: PadicApprox) -> PadicApprox:
        return PadicApprox(self.value + other.value, min(self.prec, other.prec))

    def __sub__(self, other: PadicApprox) -> PadicApprox:
        return PadicApprox(self.value - other.value, min(self.prec, other.prec))

    def __mul__(self, other: PadicApprox) -> PadicApprox:
        va, vb = self._vp(), other._vp()
        prec = min(
            _add_prec(self.prec, vb),
            _add_prec(other.prec, va),
            _add_prec(self.prec, other.prec),
        )
        return PadicApprox(self.value * other.value, prec)

    def __truediv__(self, other: PadicApprox) -> PadicApprox:
        vb = other._vp()
        if vb is INF:
            raise DivisionByZero("division by (approximate) zero")
        va = self._vp()
        prec = min(_add_prec(self.prec, -vb), _add_prec(other.prec, va - 2 * vb))
        return PadicApprox(self.value / other.value, prec)

    def agrees_mod(self, other: PadicApprox, n) -> bool:
        """Whether self == other modulo p^n (as far as both are known)."""
        diff = (self.value - other.value).vp()
        return diff is INF or diff >= n

    def known_nonzero(self) -> bool:
        """Nonzero at the stated precision: v_p(value) < prec."""
        v = self._vp()
        return v is not INF and v < self.prec

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "prec": "inf" if self.prec is INF else rat_str(Fraction(self.prec)),
        }

    def __repr__(self):
        pr = "inf" if self.prec is INF else str(self.prec)
        return f"{self.value!r} + O(p^{pr})"


def _add_prec(a, b):
    if a is INF or b is INF:
        return INF
    return a + b
