"""Closed forms for the commutative case.

Given seeds with A_{0,1} central, each table row has a generating
function

    sum_n A_{m,n} X^[n]
        = sum_{j=1}^{2m} h~_{m,j} (1 - beta X)^(m-j) X^j (1 - beta X)^(-A_{0,1}/beta),

where (1 - beta X)^(-A_{0,1}/beta) is *defined* as the rising-factorial
series sum_s prod_{i<s}(i beta + A_{0,1}) X^[s].

The h-coefficients are built by an inductive pass over m that mirrors the
summation-reordering proof: every sum over the inner index c of

    falling_factorial(c, i) * prod_{t=f+1}^{m-1} ((c-t) beta + A_{0,1})

is converted into the target basis by the scalar tables g^j_{m,f,i}
(f_{m,j} = g^j_{m,0,0}), and the extra factor c from the theta terms is
absorbed with c*FF(c,i) = FF(c,i+1) + i*FF(c,i).  All products of linear
factors (-t beta + A_{0,1}) are tracked as explicit integer multisets, so
the construction never divides by a possibly-singular matrix.

The scalar tables themselves are computed twice, by closed form and by
induction, and must agree; this pins down the beta exponent in g, which
is easy to mis-transcribe.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .cosimplicial import CosimpCtx
from .errors import NonCommutingSeeds, ShapeMismatch
from .field import FieldDesc, KElem
from .matrix import KMat
from .series import SimplexRingElem as SRE
from .series import Trunc
from .stratification import Seeds, StratTable, generate_Amn


# ---------------------------------------------------------------------------
# scalar tables f and g
# ---------------------------------------------------------------------------


class FGTables:
    """g^j_{m,f,i} in K, with f_{m,i} = g^i_{m,0,0}; dual-path construction.

    Closed form:  g^j_{m,f,i} = beta^(j-i-1)/(j (j-i-1)!) *
                  (m-(f+1)) ... (m-(f+j-i-1))     for m >= f+1,
                  i+1 <= j <= m-f+i; zero otherwise.
    Induction:    g^j_{m+1,f,i} = g^j_{m,f,i} + (beta - beta/j) g^(j-1)_{m,f,i},
                  from the base row g^(i+1)_{f+1,f,i} = 1/(i+1).
    """

    def __init__(self, field: FieldDesc):
        self.field = field
        self._closed_cache: dict = {}

    def g(self, m: int, f: int, i: int, j: int) -> KElem:
        key = (m, f, i, j)
        if key not in self._closed_cache:
            self._closed_cache[key] = self._closed(m, f, i, j)
        return self._closed_cache[key]

    def f(self, m: int, i: int) -> KElem:
        return self.g(m, 0, 0, i)

    def _closed(self, m: int, f: int, i: int, j: int) -> KElem:
        field = self.field
        if m < f + 1 or j < i + 1 or j > m - f + i:
            return field.zero
        r = j - i - 1
        num = 1
        for k in range(1, r + 1):
            num *= m - (f + k)
        scale = Fraction(num, j * factorial(r))
        return field.beta**r * scale

    def g_inductive_row(self, m: int, f: int, i: int) -> dict[int, KElem]:
        """{j: g^j_{m,f,i}} built purely from the induction; for cross-checks."""
        field = self.field
        beta = field.beta
        if m < f + 1:
            return {}
        row = {i + 1: field.from_rational(Fraction(1, i + 1))}
        for mm in range(f + 1, m):
            nxt: dict[int, KElem] = {}
            for j in range(i + 1, (mm + 1) - f + i + 1):
                cur = row.get(j, field.zero)
                prev = row.get(j - 1, field.zero)
                val = cur + prev * (beta - beta * Fraction(1, j))
                if not val.is_zero():
                    nxt[j] = val
            row = nxt
        return row


def fg_coeffs(field: FieldDesc, m_max: int) -> FGTables:
    """Build the scalar tables, verifying closed form against induction."""
    tables = FGTables(field)
    report = fg_dual_check(tables, m_max)
    if not report["ok"]:
        raise AssertionError(f"f/g dual-path disagreement: {report['mismatches']}")
    return tables


def fg_to_json(tables: FGTables, m_max: int) -> dict:
    """f and g values up to m_max, keyed by indices, zeros omitted."""
    f_out = {}
    g_out = {}
    for m in range(1, m_max + 1):
        for i in range(1, m + 1):
            val = tables.f(m, i)
            if not val.is_zero():
                f_out[f"{m},{i}"] = val.to_json()
        for f in range(0, m):
            for i in range(0, 2 * f + 2):
                for j in range(i + 1, m - f + i + 1):
                    val = tables.g(m, f, i, j)
                    if not val.is_zero():
                        g_out[f"{m},{f},{i},{j}"] = val.to_json()
    return {"f": f_out, "g": g_out}


def fg_dual_check(tables: FGTables, m_max: int, i_max: int | None = None) -> dict:
    """Compare closed form vs induction for all m <= m_max; exact."""
    mismatches = []
    checked = 0
    for f in range(0, m_max):
        imax = i_max if i_max is not None else 2 * f + 2
        for i in range(0, imax + 1):
            for m in range(f + 1, m_max + 1):
                ind = tables.g_inductive_row(m, f, i)
                for j in range(0, m - f + i + 2):
                    a = tables.g(m, f, i, j)
                    b = ind.get(j, tables.field.zero)
                    checked += 1
                    if a != b:
                        mismatches.append((m, f, i, j))
    return {"ok": not mismatches, "checked": checked, "mismatches": mismatches}


# ---------------------------------------------------------------------------
# the h table
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class HTable:
    """h[m][j] for 1 <= j <= 2m (h[0][0] = I), as matrices over K.

    h_tilde merges in the A_{0,j-m} factor for j > m.
    """

    field: FieldDesc
    l: int
    seeds: Seeds
    h: dict

    def at(self, m: int, j: int) -> KMat:
        return self.h.get(m, {}).get(j, KMat.zero(self.field, self.l))

    def h_tilde(self, m: int, j: int) -> KMat:
        base = self.at(m, j)
        if j <= m or base.is_zero():
            return base
        return base * _rising_factorial(self.field, self.seeds.a01, j - m)

    def to_json(self) -> dict:
        out = {}
        for m in sorted(self.h):
            for j in sorted(self.h[m]):
                out[f"{m},{j}"] = self.h[m][j].to_json()
        return out


def _rising_factorial(field: FieldDesc, a01: KMat, k: int) -> KMat:
    """A_{0,k} = prod_{u=0}^{k-1} (u beta + A_{0,1})."""
    l = a01.nrows
    acc = KMat.identity(field, l)
    for u in range(k):
        acc = (KMat.scalar(field, l, field.beta * u) + a01) * acc
    return acc


def _interval_counter(*intervals) -> Counter:
    out: Counter = Counter()
    for iv in intervals:
        if iv is None:
            continue
        lo, hi = iv
        for t in range(lo, hi + 1):
            out[t] += 1
    return out


def _leftover_product(field: FieldDesc, a01: KMat, multiset: Counter, remove_hi: int) -> KMat:
    """prod over (multiset minus [1, remove_hi]) of (-t beta + A_{0,1})."""
    l = a01.nrows
    for t in range(1, remove_hi + 1):
        multiset[t] -= 1
        if multiset[t] < 0:
            raise AssertionError("factor bookkeeping underflow")
    acc = KMat.identity(field, l)
    for t, mult in sorted(multiset.items()):
        if mult <= 0:
            continue
        factor = KMat.scalar(field, l, field.beta * (-t)) + a01
        for _ in range(mult):
            acc = factor * acc
    return acc


def h_table(seeds: Seeds, ctx: CosimpCtx, m_max: int, tables: FGTables | None = None) -> HTable:
    """Fill h[m][j] for m <= m_max by the summation-reordering induction."""
    if not seeds.commutative():
        raise NonCommutingSeeds("A_{0,1} must commute with every A_{j,1}")
    if len(seeds.A1) <= m_max:
        raise ShapeMismatch(f"need seeds up to A_({m_max},1)")
    field = ctx.field
    l = seeds.l
    a01 = seeds.a01
    tables = tables or FGTables(field)
    h: dict[int, dict[int, KMat]] = {0: {0: KMat.identity(field, l)}}
    for m in range(1, m_max + 1):
        # contributions (f, kernel index i', coefficient matrix, pending interval)
        contribs: list[tuple[int, int, KMat, tuple | None]] = []
        contribs.append((0, 0, seeds.A1[m], None))
        for f in range(1, m):
            r = m - f
            for i, hfi in h[f].items():
                lam = (1, f - i) if i <= f else None
                contribs.append((f, i, seeds.A1[r] * hfi, lam))
        for f in range(0, m):
            r = m - f
            th = ctx.theta_at(1, r)
            if th.is_zero():
                continue
            for i, hfi in h[f].items():
                lam = (1, f - i) if i <= f else None
                contribs.append((f, i + 1, hfi * th, lam))
                if i != f:
                    contribs.append((f, i, hfi * (th * (i - f)), lam))
        row: dict[int, KMat] = {}
        for f, ip, kappa, lam in contribs:
            if kappa.is_zero():
                continue
            for j in range(max(ip + 1, 1), m - f + ip + 1):
                gj = tables.g(m, f, ip, j)
                if gj.is_zero():
                    continue
                multiset = _interval_counter(lam, (f - ip + 1, m - j))
                leftover = _leftover_product(field, a01, multiset, max(m - j, 0))
                term = kappa * leftover * gj
                cur = row.get(j)
                row[j] = term if cur is None else cur + term
        h[m] = {j: mat for j, mat in row.items() if not mat.is_zero()}
    return HTable(field, l, seeds, h)


# ---------------------------------------------------------------------------
# closed-form series and the dual-path verification
# ---------------------------------------------------------------------------


def exponential_sum_series(field: FieldDesc, a01: KMat, trunc: Trunc) -> SRE:
    """(1 - beta X)^(-A_{0,1}/beta) := sum_s prod_{i<s}(i beta + A_{0,1}) X^[s]."""
    l = a01.nrows
    out: dict = {}
    acc = KMat.identity(field, l)
    for s in range(trunc.pd_degree + 1):
        if not acc.is_zero():
            out[(0, (s,))] = acc
        acc = (KMat.scalar(field, l, field.beta * s) + a01) * acc
    return SRE(field, 1, trunc, l, out)


def closedform_series(htable: HTable, m: int, ctx: CosimpCtx, pd_degree: int | None = None) -> SRE:
    """The generating function of row m, as a 1-variable pd polynomial."""
    field = ctx.field
    deg = ctx.trunc.pd_degree if pd_degree is None else pd_degree
    tr = Trunc(1, deg)
    l = htable.l
    growth = exponential_sum_series(field, htable.seeds.a01, tr)
    if m == 0:
        return growth
    one = SRE.one(field, 1, tr)
    x = SRE.monomial(field, 1, tr, 0, (1,), KMat.identity(field, 1))
    base = one + x * (-field.beta)
    base_inv = base.invert()
    out = SRE.zero(field, 1, tr, l)
    for j in range(1, 2 * m + 1):
        hj = htable.h_tilde(m, j)
        if hj.is_zero():
            continue
        power = base ** (m - j) if m >= j else base_inv ** (j - m)
        xj = SRE.monomial(field, 1, tr, 0, (j,), KMat.identity(field, 1) * factorial(j))
        scal = (power * xj).map_size(l)
        out = out + (hj * scal) * growth
    return out


def row_series(table: StratTable, m: int, field: FieldDesc, pd_degree: int) -> SRE:
    """sum_n A_{m,n} X^[n] from a generated table, for comparison."""
    tr = Trunc(1, pd_degree)
    out: dict = {}
    for n in range(min(table.n_max, pd_degree) + 1):
        mat = table.at(m, n)
        if not mat.is_zero():
            out[(0, (n,))] = mat
    return SRE(field, 1, tr, table.l, out)


def verify_commutative(seeds: Seeds, ctx: CosimpCtx, m_max: int, pd_degree: int) -> dict:
    """Coefficient-wise residual between the recursion rows and the closed form."""
    if not seeds.commutative():
        raise NonCommutingSeeds("A_{0,1} must commute with every A_{j,1}")
    field = ctx.field
    tables = FGTables(field)
    ht = h_table(seeds, ctx, m_max, tables)
    table = generate_Amn(seeds, ctx, pd_degree)
    rows = {}
    ok = True
    for m in range(m_max + 1):
        closed = closedform_series(ht, m, ctx, pd_degree)
        direct = row_series(table, m, field, pd_degree)
        diff = closed - direct
        nonzero = sorted(idx[0] for (_, idx) in diff.coeffs)
        if nonzero:
            ok = False
        rows[str(m)] = {"residual_degrees": nonzero, "zero": not nonzero}
    return {"ok": ok, "m_max": m_max, "pd_degree": pd_degree, "rows": rows}


# ---------------------------------------------------------------------------
# polynomial-in-s identity checks for the summation identities
# ---------------------------------------------------------------------------


def _falling_factorial(s: int, i: int) -> int:
    out = 1
    for u in range(i):
        out *= s - u
    return out


def _linear_factor(field: FieldDesc, a01: KMat, scalar: KElem) -> KMat:
    return KMat.scalar(field, a01.nrows, scalar) + a01


def lemma_identity_check(
    field: FieldDesc,
    kind: str,
    a01: KMat,
    params: dict,
    tables: FGTables | None = None,
    s_samples: list[int] | None = None,
) -> dict:
    """Evaluate both sides of a summation identity at integer samples s.

    Both sides are polynomials in s of degree <= m+i+1, so agreement on
    degree+1 samples certifies the identity for the given A_{0,1}.
    """
    tables = tables or FGTables(field)
    beta = field.beta
    l = a01.nrows

    if kind == "change_m":
        m = params["m"]
        f, i = 0, 0
    elif kind == "change_mfi":
        m, f, i = params["m"], params["f"], params["i"]
    elif kind == "exp_sum":
        return _exp_sum_check(field, a01, params)
    else:
        raise ValueError(f"unknown lemma kind {kind!r}")

    degree = m + i + 1
    samples = s_samples if s_samples is not None else list(range(degree + 1))
    mismatches = []
    for s in samples:
        lhs = KMat.zero(field, l)
        for c in range(s):
            term = KMat.identity(field, l) * _falling_factorial(c, i)
            for t in range(f + 1, m):
                term = _linear_factor(field, a01, beta * (c - t)) * term
            lhs = lhs + term
        rhs = KMat.zero(field, l)
        for j in range(i + 1, m - f + i + 1):
            gj = tables.g(m, f, i, j)
            if gj.is_zero():
                continue
            term = KMat.identity(field, l) * (_falling_factorial(s, j) * gj)
            for t in range(f - i + 1, m - j + 1):
                term = _linear_factor(field, a01, beta * (-t)) * term
            rhs = rhs + term
        if lhs != rhs:
            mismatches.append(s)
    return {
        "kind": kind,
        "params": dict(params),
        "degree": degree,
        "samples": list(samples),
        "ok": not mismatches,
        "mismatching_samples": mismatches,
    }


def _exp_sum_check(field: FieldDesc, a: KMat, params: dict) -> dict:
    """sum_s A_{k+s} X^[s] = A_k (1 - beta X)^(-A/beta - k), both truncated."""
    k = params.get("k", 0)
    deg = params.get("pd_degree", 8)
    tr = Trunc(1, deg)
    l = a.nrows
    beta = field.beta
    lhs: dict = {}
    acc = _rising_factorial(field, a, k)
    ak = acc
    for s in range(deg + 1):
        if not acc.is_zero():
            lhs[(0, (s,))] = acc
        acc = _linear_factor(field, a, beta * (k + s)) * acc
    lhs_sre = SRE(field, 1, tr, l, lhs)
    one = SRE.one(field, 1, tr)
    x = SRE.monomial(field, 1, tr, 0, (1,), KMat.identity(field, 1))
    exponent = a * beta.inverse() * -1 - KMat.scalar(field, l, field.from_rational(k))
    rhs_sre = ak * (one + x * (-beta)).exp_pow(exponent)
    ok = lhs_sre == rhs_sre
    return {"kind": "exp_sum", "params": dict(params), "ok": ok}


# ---------------------------------------------------------------------------
# the a_k series and the conjecture residual
# ---------------------------------------------------------------------------


def ak_series(seeds: Seeds, ctx: CosimpCtx, k_max: int) -> list[KMat]:
    """a_0 = I and, with the inner term read as (d - A) a_i,

        a_k = 1/(k beta) sum_{i+s=k, i<k} (d_{i+a,s,1} - A_{s,1}) a_i

    with d_{i+a,s,1} = -(i + a) theta_{1,s} and a = -A_{0,1}/beta.
    """
    if not seeds.commutative():
        raise NonCommutingSeeds("A_{0,1} must commute with every A_{j,1}")
    field = ctx.field
    l = seeds.l
    beta = field.beta
    a01 = seeds.a01
    if len(seeds.A1) <= k_max:
        raise ShapeMismatch(f"need seeds up to A_({k_max},1)")
    out = [KMat.identity(field, l)]
    binv = beta.inverse()
    for k in range(1, k_max + 1):
        acc = KMat.zero(field, l)
        for i in range(k):
            s = k - i
            th = ctx.theta_at(1, s)
            # d_{i+a,s,1} = -(i I - A_{0,1}/beta) theta_{1,s}
            d_mat = (KMat.scalar(field, l, field.from_rational(-i)) + a01 * binv) * th
            acc = acc + (d_mat - seeds.A1[s]) * out[i]
        out.append(acc * (binv * Fraction(1, k)))
    return out


def conjecture_residual(seeds: Seeds, ctx: CosimpCtx, k_max: int) -> dict:
    """Per-k residual of the invertible-function identity:

        sum_{i+s=k} (sum_n d_{i+a,s,n} X^[n]) a_i
            = sum_{m+l=k} (sum_n A_{m,n} X^[n]) a_l,

    with d_{i+a,s,n} read off from alpha^(i+a) = alpha^i alpha^a and
    alpha^a = exp((-A_{0,1}/beta) log alpha).  k = 0, 1, 2 admit a short hand
    verification; higher k is reported as a finding.
    """
    if not seeds.commutative():
        raise NonCommutingSeeds("A_{0,1} must commute with every A_{j,1}")
    field = ctx.field
    if ctx.trunc.t_order <= k_max:
        raise ShapeMismatch("need t_order > k_max")
    l = seeds.l
    deg = ctx.trunc.pd_degree
    tr1 = Trunc(1, deg)
    a_list = ak_series(seeds, ctx, k_max)
    table = generate_Amn(seeds, ctx, deg)
    exponent = seeds.a01 * field.beta.inverse() * -1
    alpha_a = ctx.alpha.exp_pow(exponent)
    residuals = {}
    low_k_zero = True
    for k in range(k_max + 1):
        lhs = SRE.zero(field, 1, tr1, l)
        power = ctx.alpha_pow(0)
        for i in range(k + 1):
            s = k - i
            if i > 0:
                power = ctx.alpha_pow(i)
            alpha_ia = alpha_a * power.map_size(l)
            d_slice: dict = {}
            for idx, mat in alpha_ia.t_slice(s).items():
                d_slice[(0, idx)] = mat
            d_sre = SRE(field, 1, tr1, l, d_slice)
            lhs = lhs + d_sre * a_list[i]
        rhs = SRE.zero(field, 1, tr1, l)
        for m in range(k + 1):
            rhs = rhs + row_series(table, m, field, deg) * a_list[k - m]
        diff = lhs - rhs
        nonzero = sorted(idx[0] for (_, idx) in diff.coeffs)
        residuals[str(k)] = {
            "zero": not nonzero,
            "nonzero_degrees": nonzero,
        }
        if k <= 2 and nonzero:
            low_k_zero = False
    return {
        "k_max": k_max,
        "pd_degree": deg,
        "residuals": residuals,
        "low_k_zero": low_k_zero,
    }
