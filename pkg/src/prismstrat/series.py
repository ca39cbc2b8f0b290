"""Truncated models of K{X_1..X_n}_pd[[t]] and matrix algebras over them.

Elements are maps (t-exponent m, divided-power multi-index a) -> l x l
matrix over K, on the monomial basis X_1^[a_1]...X_n^[a_n] t^m with the
divided-power product rule X^[i] X^[j] = C(i+j, i) X^[i+j].  Truncation
keeps m < t_order and total pd degree <= pd_degree; both cuts are ideals,
so products never resurrect dropped terms.

Ordinary powers are never stored: X^n enters as n! X^[n].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import BadConstantTerm, NonUnit, ShapeMismatch
from .field import FieldDesc, KElem
from .matrix import KMat, kernel_basis

MultiIndex = tuple[int, ...]
Key = tuple[int, MultiIndex]


@dataclass(frozen=True, slots=True)
class Trunc:
    """Work modulo t^t_order, dropping pd monomials of total degree > pd_degree."""

    t_order: int
    pd_degree: int

    def __post_init__(self):
        if self.t_order < 1 or self.pd_degree < 0:
            raise ShapeMismatch("need t_order >= 1 and pd_degree >= 0")

    def contains(self, m: int, idx: MultiIndex) -> bool:
        return m < self.t_order and sum(idx) <= self.pd_degree

    def shrinks_to(self, other: Trunc) -> bool:
        return other.t_order <= self.t_order and other.pd_degree <= self.pd_degree


class SimplexRingElem:
    """Truncated element of the n-variable simplex ring, matrix valued."""

    __slots__ = ("field", "n_vars", "trunc", "size", "coeffs")

    def __init__(self, field: FieldDesc, n_vars: int, trunc: Trunc, size: int, coeffs=None):
        self.field = field
        self.n_vars = n_vars
        self.trunc = trunc
        self.size = size
        self.coeffs: dict[Key, KMat] = {}
        if coeffs:
            for key, mat in coeffs.items():
                if not mat.is_zero() and trunc.contains(*key):
                    self.coeffs[key] = mat

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(field, n_vars, trunc, size=1) -> SimplexRingElem:
        return SimplexRingElem(field, n_vars, trunc, size)

    @staticmethod
    def one(field, n_vars, trunc, size=1) -> SimplexRingElem:
        out = SimplexRingElem(field, n_vars, trunc, size)
        out.coeffs[(0, (0,) * n_vars)] = KMat.identity(field, size)
        return out

    @staticmethod
    def from_matrix(field, n_vars, trunc, mat: KMat) -> SimplexRingElem:
        out = SimplexRingElem(field, n_vars, trunc, mat.nrows)
        if not mat.is_zero():
            out.coeffs[(0, (0,) * n_vars)] = mat
        return out

    @staticmethod
    def from_scalar(field, n_vars, trunc, c: KElem, size=1) -> SimplexRingElem:
        return SimplexRingElem.from_matrix(
            field, n_vars, trunc, KMat.scalar(field, size, c)
        )

    @staticmethod
    def monomial(field, n_vars, trunc, m: int, idx: MultiIndex, coeff: KMat) -> SimplexRingElem:
        """coeff * X^[idx] t^m (divided-power monomial)."""
        out = SimplexRingElem(field, n_vars, trunc, coeff.nrows)
        if trunc.contains(m, tuple(idx)) and not coeff.is_zero():
            out.coeffs[(m, tuple(idx))] = coeff
        return out

    @staticmethod
    def ordinary_monomial(field, n_vars, trunc, m: int, powers: MultiIndex, coeff: KMat) -> SimplexRingElem:
        """coeff * X^powers t^m with ordinary powers, rewritten via X^n = n! X^[n]."""
        scale = 1
        for a in powers:
            scale *= factorial(a)
        return SimplexRingElem.monomial(
            field, n_vars, trunc, m, tuple(powers), coeff * Fraction(scale)
        )

    # -- helpers -----------------------------------------------------------

    def _zero_mat(self) -> KMat:
        return KMat.zero(self.field, self.size)

    def coeff(self, m: int, idx: MultiIndex) -> KMat:
        return self.coeffs.get((m, tuple(idx)), self._zero_mat())

    def constant_term(self) -> KMat:
        return self.coeff(0, (0,) * self.n_vars)

    def t_slice(self, m: int) -> dict[MultiIndex, KMat]:
        """The pd-polynomial coefficient of t^m."""
        return {idx: mat for (mm, idx), mat in self.coeffs.items() if mm == m}

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_scalar_valued(self) -> bool:
        """All coefficients are scalar multiples of the identity."""
        for mat in self.coeffs.values():
            c = mat.rows[0][0]
            if mat != KMat.scalar(self.field, self.size, c):
                return False
        return True

    def _check_compatible(self, other: SimplexRingElem):
        if (
            self.field != other.field
            or self.n_vars != other.n_vars
            or self.trunc != other.trunc
            or self.size != other.size
        ):
            raise ShapeMismatch("operands live in different truncated rings")

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: SimplexRingElem) -> SimplexRingElem:
        self._check_compatible(other)
        out = dict(self.coeffs)
        for key, mat in other.coeffs.items():
            cur = out.get(key)
            out[key] = mat if cur is None else cur + mat
        return SimplexRingElem(self.field, self.n_vars, self.trunc, self.size, out)

    def __sub__(self, other: SimplexRingElem) -> SimplexRingElem:
        return self + (-other)

    def __neg__(self) -> SimplexRingElem:
        return SimplexRingElem(
            self.field,
            self.n_vars,
            self.trunc,
            self.size,
            {key: -mat for key, mat in self.coeffs.items()},
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, KElem)):
            return SimplexRingElem(
                self.field,
                self.n_vars,
                self.trunc,
                self.size,
                {key: mat * other for key, mat in self.coeffs.items()},
            )
        if isinstance(other, KMat):
            return SimplexRingElem(
                self.field,
                self.n_vars,
                self.trunc,
                self.size,
                {key: mat * other for key, mat in self.coeffs.items()},
            )
        self._check_compatible(other)
        trunc = self.trunc
        out: dict[Key, KMat] = {}
        for (m1, i1), a in self.coeffs.items():
            for (m2, i2), b in other.coeffs.items():
                m = m1 + m2
                if m >= trunc.t_order:
                    continue
                idx = tuple(x + y for x, y in zip(i1, i2))
                if sum(idx) > trunc.pd_degree:
                    continue
                scale = 1
                for x, y in zip(i1, i2):
                    if x and y:
                        scale *= comb(x + y, x)
                term = a * b
                if scale != 1:
                    term = term * Fraction(scale)
                key = (m, idx)
                cur = out.get(key)
                out[key] = term if cur is None else cur + term
        return SimplexRingElem(self.field, self.n_vars, self.trunc, self.size, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, KElem)):
            return self.__mul__(other)
        if isinstance(other, KMat):
            return SimplexRingElem(
                self.field,
                self.n_vars,
                self.trunc,
                self.size,
                {key: other * mat for key, mat in self.coeffs.items()},
            )
        return NotImplemented

    def __pow__(self, n: int) -> SimplexRingElem:
        if n < 0:
            return self.invert() ** (-n)
        acc = SimplexRingElem.one(self.field, self.n_vars, self.trunc, self.size)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def __eq__(self, other):
        if not isinstance(other, SimplexRingElem):
            return NotImplemented
        return (
            self.field == other.field
            and self.n_vars == other.n_vars
            and self.trunc == other.trunc
            and self.size == other.size
            and self.coeffs == other.coeffs
        )

    def invert(self) -> SimplexRingElem:
        """Inverse of a unit: constant term must be an invertible matrix."""
        c = self.constant_term()
        cinv = _mat_inverse(c)
        if cinv is None:
            raise NonUnit("constant term is not invertible")
        one = SimplexRingElem.one(self.field, self.n_vars, self.trunc, self.size)
        # a = c (1 - n) with n topologically nilpotent; a^-1 = (sum n^k) c^-1
        n = one - self * cinv
        acc = one
        term = one
        while True:
            term = term * n
            if term.is_zero():
                break
            acc = acc + term
        return cinv * acc

    def log(self) -> SimplexRingElem:
        """log of an element with constant term the identity matrix."""
        c = self.constant_term()
        if c != KMat.identity(self.field, self.size):
            raise BadConstantTerm("log needs constant term I")
        one = SimplexRingElem.one(self.field, self.n_vars, self.trunc, self.size)
        n = self - one
        acc = SimplexRingElem.zero(self.field, self.n_vars, self.trunc, self.size)
        term = one
        k = 0
        while True:
            term = term * n
            k += 1
            if term.is_zero():
                break
            acc = acc + term * Fraction((-1) ** (k - 1), k)
        return acc

    def exp(self) -> SimplexRingElem:
        """exp of an element with zero constant term."""
        if not self.constant_term().is_zero():
            raise BadConstantTerm("exp needs zero constant term")
        one = SimplexRingElem.one(self.field, self.n_vars, self.trunc, self.size)
        acc = one
        term = one
        k = 0
        while True:
            k += 1
            term = term * self * Fraction(1, k)
            if term.is_zero():
                break
            acc = acc + term
        return acc

    def exp_pow(self, exponent: KMat) -> SimplexRingElem:
        """a^M := exp(M log a), for scalar-valued a with constant term 1.

        The result is an exponent.nrows-sized matrix series.
        """
        if self.size != 1:
            raise ShapeMismatch("exp_pow needs a scalar-valued base")
        c = self.constant_term()
        if c != KMat.identity(self.field, 1):
            raise BadConstantTerm("exp_pow needs constant term 1")
        lg = self.log()
        size = exponent.nrows
        mlog = SimplexRingElem(
            self.field,
            self.n_vars,
            self.trunc,
            size,
            {key: exponent * mat.rows[0][0] for key, mat in lg.coeffs.items()},
        )
        return mlog.exp()

    def truncate(self, trunc: Trunc) -> SimplexRingElem:
        """Restrict to a smaller truncation window."""
        if not self.trunc.shrinks_to(trunc):
            raise ShapeMismatch("can only truncate to a smaller window")
        return SimplexRingElem(self.field, self.n_vars, trunc, self.size, self.coeffs)

    def map_size(self, size: int) -> SimplexRingElem:
        """Reinterpret a scalar series as size x size scalar matrices."""
        if self.size != 1:
            raise ShapeMismatch("map_size applies to scalar series")
        return SimplexRingElem(
            self.field,
            self.n_vars,
            self.trunc,
            size,
            {
                key: KMat.scalar(self.field, size, mat.rows[0][0])
                for key, mat in self.coeffs.items()
            },
        )

    def embed(self, n_vars: int, var_map: dict[int, int] | None = None) -> SimplexRingElem:
        """Embed into a ring with more variables; var_map sends old variable
        positions (0-based) to new ones, defaulting to the identity."""
        if n_vars < self.n_vars:
            raise ShapeMismatch("cannot embed into fewer variables")
        if var_map is None:
            var_map = {i: i for i in range(self.n_vars)}
        out: dict[Key, KMat] = {}
        for (m, idx), mat in self.coeffs.items():
            new_idx = [0] * n_vars
            for old, a in enumerate(idx):
                if a:
                    new_idx[var_map[old]] = a
            out[(m, tuple(new_idx))] = mat
        return SimplexRingElem(self.field, n_vars, self.trunc, self.size, out)

    def to_json(self) -> dict:
        entries = []
        for (m, idx) in sorted(self.coeffs):
            entries.append(
                {
                    "m": m,
                    "multi_index": list(idx),
                    "matrix": self.coeffs[(m, idx)].to_json(),
                }
            )
        return {
            "trunc": {"t": self.trunc.t_order, "x": self.trunc.pd_degree},
            "n_vars": self.n_vars,
            "size": self.size,
            "entries": entries,
        }

    @staticmethod
    def from_json(field: FieldDesc, data: dict) -> SimplexRingElem:
        trunc = Trunc(data["trunc"]["t"], data["trunc"]["x"])
        out = SimplexRingElem(field, data["n_vars"], trunc, data["size"])
        for entry in data["entries"]:
            key = (entry["m"], tuple(entry["multi_index"]))
            mat = KMat.from_json(field, entry["matrix"])
            if trunc.contains(*key) and not mat.is_zero():
                out.coeffs[key] = mat
        return out

    def __repr__(self):
        if not self.coeffs:
            return "SRE(0)"
        parts = []
        for (m, idx) in sorted(self.coeffs)[:8]:
            parts.append(f"t^{m} X{list(idx)}: {self.coeffs[(m, idx)]!r}")
        more = "" if len(self.coeffs) <= 8 else f" ... ({len(self.coeffs)} terms)"
        return "SRE{" + "; ".join(parts) + more + "}"


def _mat_inverse(m: KMat) -> KMat | None:
    """Inverse over K, or None when singular."""
    n = m.nrows
    if n != m.ncols:
        return None
    field = m.field
    aug = [list(r) + list(KMat.identity(field, n).rows[i]) for i, r in enumerate(m.rows)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if not aug[i][c].is_zero()), None)
        if piv is None:
            return None
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = aug[r][c].inverse()
        aug[r] = [a * inv for a in aug[r]]
        for i in range(n):
            if i != r and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    return KMat.from_rows(field, [row[n:] for row in aug])


def mat_inverse(m: KMat) -> KMat:
    out = _mat_inverse(m)
    if out is None:
        raise NonUnit("matrix is singular over K")
    return out


def sre_arith(a: SimplexRingElem, b: SimplexRingElem, op: str) -> SimplexRingElem:
    """Dispatch form of ring arithmetic (add/mul)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def sre_invert(a: SimplexRingElem) -> SimplexRingElem:
    return a.invert()


def sre_log(a: SimplexRingElem) -> SimplexRingElem:
    return a.log()


def sre_exp_pow(a: SimplexRingElem, exponent: KMat) -> SimplexRingElem:
    return a.exp_pow(exponent)


# kernel_basis is re-exported for callers that already import series
__all__ = [
    "Trunc",
    "SimplexRingElem",
    "sre_arith",
    "sre_invert",
    "sre_log",
    "sre_exp_pow",
    "mat_inverse",
    "kernel_basis",
]
