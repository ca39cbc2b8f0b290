"""The cosimplicial structure on the truncated simplex rings.

Carries the series u0(t) with E(u0) = t (Hensel lift of pi), the
coefficients theta_{n,i} of E^{(n)}(u0), the unit alpha = E(u1)/E(u0)
expanded in (X_1, t), the divided-power coefficient tables c_{p,s} and
d_{p,s,k} of its integer powers, and the face maps delta_i into the
1- and 2-simplex rings.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IndexOutOfRange, ShapeMismatch
from .field import FieldDesc, KElem
from .matrix import KMat
from .series import SimplexRingElem as SRE
from .series import Trunc


def eval_poly_at_series(field: FieldDesc, coeffs, s: SRE) -> SRE:
    """Evaluate a rational/K-coefficient polynomial at a series (Horner)."""
    acc = SRE.zero(field, s.n_vars, s.trunc, s.size)
    for c in reversed(list(coeffs)):
        k = c if isinstance(c, KElem) else field.from_rational(c)
        acc = acc * s + SRE.from_scalar(field, s.n_vars, s.trunc, k, s.size)
    return acc


def hensel_u0(field: FieldDesc, t_order: int) -> SRE:
    """Solve E(u0) = t in K[[t]]/t^t_order with u0(0) = pi, by Newton.

    E'(pi) = beta is nonzero (E is Eisenstein and E' has degree < e), so
    this is a formal Hensel lift; each step doubles the t-adic accuracy.
    """
    trunc = Trunc(t_order, 0)
    t = SRE.monomial(field, 0, trunc, 1, (), KMat.identity(field, 1))
    u = SRE.from_scalar(field, 0, trunc, field.pi)
    dE = field.E_derivative(1)
    while True:
        err = eval_poly_at_series(field, field.E_coeffs, u) - t
        if err.is_zero():
            return u
        u = u - err * eval_poly_at_series(field, dE, u).invert()


class CosimpCtx:
    """Field + truncation + the derived cosimplicial data, all immutable.

    theta[(n, i)] is the t^i coefficient of E^{(n)}(u0), for 1 <= n <= e
    and 0 <= i < t_order; theta_{1,0} = beta.
    """

    def __init__(self, field: FieldDesc, trunc: Trunc):
        self.field = field
        self.trunc = trunc
        lifted = hensel_u0(field, trunc.t_order)
        self.u0 = SRE(field, 0, trunc, 1, lifted.coeffs)
        self.theta = theta_table(field, self.u0, trunc.t_order)
        self.alpha = alpha_series(field, self.theta, trunc)
        self._alpha_pows: dict[int, SRE] = {0: SRE.one(field, 1, trunc), 1: self.alpha}
        self._alpha_pows_2v: dict[int, SRE] = {}

    def trunc_0v(self) -> Trunc:
        """Truncation window for 0-variable (pure t-series) companions."""
        return self.trunc

    def theta_at(self, n: int, i: int) -> KElem:
        if i < 0:
            return self.field.zero
        return self.theta.get((n, i), self.field.zero)

    @property
    def beta(self) -> KElem:
        return self.field.beta

    def alpha_pow(self, k: int) -> SRE:
        """alpha^k in the 1-variable ring, cached; integer k of either sign."""
        if k not in self._alpha_pows:
            if k < 0:
                inv = self._alpha_pows.get(-1)
                if inv is None:
                    inv = self.alpha.invert()
                    self._alpha_pows[-1] = inv
                self._alpha_pows[k] = inv ** (-k)
            else:
                self._alpha_pows[k] = self.alpha**k
        return self._alpha_pows[k]

    def alpha_pow_2v(self, k: int) -> SRE:
        """alpha^k embedded into the 2-variable ring (X_1 in place)."""
        if k not in self._alpha_pows_2v:
            self._alpha_pows_2v[k] = self.alpha_pow(k).embed(2)
        return self._alpha_pows_2v[k]


def theta_table(field: FieldDesc, u0: SRE, t_order: int) -> dict[tuple[int, int], KElem]:
    out: dict[tuple[int, int], KElem] = {}
    for n in range(1, field.e + 1):
        series = eval_poly_at_series(field, field.E_derivative(n), u0)
        for i in range(t_order):
            coeff = series.coeff(i, ())
            out[(n, i)] = coeff.rows[0][0]
    return out


def alpha_series(field: FieldDesc, theta, trunc: Trunc) -> SRE:
    """alpha = 1 + sum_{n=1}^{e} (-1)^n E^{(n)}(u0) X_1^[n] t^(n-1).

    The 1/n! of the Taylor expansion is absorbed by X_1^n = n! X_1^[n].
    """
    out = SRE.one(field, 1, trunc)
    for n in range(1, field.e + 1):
        if n > trunc.pd_degree:
            break
        sign = -1 if n % 2 else 1
        for j in range(n - 1, trunc.t_order):
            th = theta.get((n, j - (n - 1)), field.zero)
            if th.is_zero():
                continue
            coeff = KMat.scalar(field, 1, th * sign)
            out = out + SRE.monomial(field, 1, trunc, j, (n,), coeff)
    return out


@dataclass(frozen=True, slots=True)
class CDTable:
    """c_{p,s} as pd polynomials and their coefficients d_{p,s,k}.

    c[(p, s)] maps k -> d_{p,s,k} in K; missing keys are zero.
    """

    field: FieldDesc
    c: dict

    def c_poly(self, p: int, s: int) -> dict[int, KElem]:
        return self.c.get((p, s), {})

    def d(self, p: int, s: int, k: int) -> KElem:
        return self.c.get((p, s), {}).get(k, self.field.zero)

    def to_json(self) -> dict:
        entries = []
        for (p, s) in sorted(self.c):
            poly = self.c[(p, s)]
            entries.append(
                {
                    "p": p,
                    "s": s,
                    "d": {str(k): v.to_json() for k, v in sorted(poly.items())},
                }
            )
        return {"entries": entries}


def theta_report(ctx: CosimpCtx) -> dict:
    """theta_{n,i} keyed by "n,i", JSON-ready."""
    return {
        f"{n},{i}": ctx.theta[(n, i)].to_json()
        for (n, i) in sorted(ctx.theta)
        if not ctx.theta[(n, i)].is_zero()
    }


def cd_table(ctx: CosimpCtx, p_range) -> CDTable:
    """Extract c_{p,s} = (t^s coefficient of alpha^p) for each p in p_range."""
    c: dict = {}
    for p in p_range:
        pow_p = ctx.alpha_pow(p)
        for s in range(ctx.trunc.t_order):
            poly = {}
            for idx, mat in pow_p.t_slice(s).items():
                poly[idx[0]] = mat.rows[0][0]
            c[(p, s)] = poly
    return CDTable(ctx.field, c)


def pd_binomial(field: FieldDesc, trunc: Trunc, q: int) -> SRE:
    """(X_2 - X_1)^[q] = sum_k (-1)^(q-k) X_1^[q-k] X_2^[k], in two variables."""
    out = SRE.zero(field, 2, trunc)
    for k in range(q + 1):
        sign = -1 if (q - k) % 2 else 1
        out = out + SRE.monomial(
            field, 2, trunc, 0, (q - k, k), KMat.identity(field, 1) * sign
        )
    return out


def face_map(ctx: CosimpCtx, i: int, x: SRE) -> SRE:
    """delta_i from the n-simplex ring into the (n+1)-simplex ring, n in {0, 1}.

    delta_0 sends X_j to (X_{j+1} - X_1) alpha^{-1} and t to alpha*t; the
    other faces relabel variables and fix t.  On the basis this reads

        X_1^[q] t^p  |->  (X_2 - X_1)^[q] alpha^(p-q) t^p   (n = 1, i = 0).
    """
    if x.trunc.t_order != ctx.trunc.t_order:
        raise ShapeMismatch("element t-order differs from the context truncation")
    if x.n_vars == 0:
        if i not in (0, 1):
            raise IndexOutOfRange(f"face index {i} out of range for the 0-simplex")
        out = SRE.zero(ctx.field, 1, ctx.trunc, x.size)
        for (m, _), mat in x.coeffs.items():
            if i == 0:
                scal = ctx.alpha_pow(m)
                term = _scale_scalar_series(scal, mat, shift_t=m)
            else:
                term = SRE.monomial(ctx.field, 1, ctx.trunc, m, (0,), mat)
            out = out + term
        return out
    if x.n_vars == 1:
        if i not in (0, 1, 2):
            raise IndexOutOfRange(f"face index {i} out of range for the 1-simplex")
        if x.trunc != ctx.trunc:
            raise ShapeMismatch("element truncation differs from the context")
        field = ctx.field
        if i == 1:
            return x.embed(2, {0: 1})
        if i == 2:
            return x.embed(2, {0: 0})
        out = SRE.zero(field, 2, ctx.trunc, x.size)
        for (p, idx), mat in x.coeffs.items():
            q = idx[0]
            scal = pd_binomial(field, ctx.trunc, q) * ctx.alpha_pow_2v(p - q)
            out = out + _scale_scalar_series(scal, mat, shift_t=p)
        return out
    raise ShapeMismatch("face maps are implemented into the 1- and 2-simplex rings")


def _scale_scalar_series(scal: SRE, mat: KMat, shift_t: int = 0) -> SRE:
    """mat * scal * t^shift_t, lifting a scalar series to matrix coefficients."""
    out: dict = {}
    trunc = scal.trunc
    for (m, idx), unit in scal.coeffs.items():
        mm = m + shift_t
        if mm >= trunc.t_order:
            continue
        out[(mm, idx)] = mat * unit.rows[0][0]
    return SRE(scal.field, scal.n_vars, trunc, mat.nrows, out)
