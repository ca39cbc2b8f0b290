"""Cosimplicial layer: u0, theta table, alpha, c/d tables, face maps."""

from fractions import Fraction

import pytest

from prismstrat.cosimplicial import (
    CosimpCtx,
    cd_table,
    eval_poly_at_series,
    face_map,
    hensel_u0,
    pd_binomial,
)
from prismstrat.errors import IndexOutOfRange
from prismstrat.field import field_init
from prismstrat.matrix import KMat
from prismstrat.series import SimplexRingElem as SRE
from prismstrat.series import Trunc

F1 = field_init(3, [-3, 1])
F2 = field_init(3, [-3, 0, 1])


def test_u0_linear_field_is_exact():
    u0 = hensel_u0(F1, 4)
    # E = u - 3: u0 = 3 + t on the nose
    assert u0.coeff(0, ()).rows[0][0] == F1.from_rational(3)
    assert u0.coeff(1, ()).rows[0][0] == F1.one
    assert u0.coeff(2, ()).is_zero()
    assert u0.coeff(3, ()).is_zero()


@pytest.mark.parametrize("field", [F1, F2], ids=["e1", "e2"])
def test_u0_satisfies_defining_equation(field):
    t_order = 6
    u0 = hensel_u0(field, t_order)
    lhs = eval_poly_at_series(field, field.E_coeffs, u0)
    t = SRE.monomial(field, 0, Trunc(t_order, 0), 1, (), KMat.identity(field, 1))
    assert lhs == t
    assert u0.coeff(0, ()).rows[0][0] == field.pi


@pytest.mark.parametrize("field", [F1, F2], ids=["e1", "e2"])
def test_u0_linear_coefficient_is_beta_inverse(field):
    u0 = hensel_u0(field, 3)
    assert u0.coeff(1, ()).rows[0][0] == field.beta.inverse()


def test_theta_base_values():
    ctx = CosimpCtx(F2, Trunc(5, 4))
    # theta_{n,0} = E^(n)(pi)
    assert ctx.theta_at(1, 0) == F2.beta
    assert ctx.theta_at(2, 0) == F2.from_rational(2)  # E'' = 2
    # E = u^2 - 3: theta_{1,1} = 2/beta = 1/pi
    assert ctx.theta_at(1, 1) == F2.pi.inverse()


def test_theta_vanishes_for_unramified():
    ctx = CosimpCtx(F1, Trunc(5, 4))
    for r in range(1, 5):
        assert ctx.theta_at(1, r).is_zero()


def test_alpha_constant_and_linear_terms():
    for field in (F1, F2):
        ctx = CosimpCtx(field, Trunc(4, 5))
        a = ctx.alpha
        assert a.coeff(0, (0,)) == KMat.identity(field, 1)
        assert a.coeff(0, (1,)).rows[0][0] == -field.beta
        # alpha(X_1 = 0) = 1: no pure-t terms
        for m in range(1, 4):
            assert a.coeff(m, (0,)).is_zero()


def test_alpha_e1_is_exactly_linear():
    ctx = CosimpCtx(F1, Trunc(4, 5))
    expect = SRE.one(F1, 1, ctx.trunc) + SRE.monomial(
        F1, 1, ctx.trunc, 0, (1,), KMat.identity(F1, 1) * -1
    )
    assert ctx.alpha == expect  # beta = 1 here


def test_alpha_unit_and_power_laws():
    ctx = CosimpCtx(F2, Trunc(3, 4))
    one = SRE.one(F2, 1, ctx.trunc)
    assert ctx.alpha * ctx.alpha_pow(-1) == one
    for p, q in [(2, 3), (-2, 3), (-1, -2), (4, -4)]:
        assert ctx.alpha_pow(p) * ctx.alpha_pow(q) == ctx.alpha_pow(p + q)


def test_cd_basic_structure():
    ctx = CosimpCtx(F2, Trunc(4, 4))
    table = cd_table(ctx, range(-3, 4))
    beta = F2.beta
    one_minus_bx = SRE.one(F2, 1, ctx.trunc) + SRE.monomial(
        F2, 1, ctx.trunc, 0, (1,), KMat.scalar(F2, 1, -beta)
    )
    for p in range(-3, 4):
        # c_{p,0} = (1 - beta X_1)^p
        expect = one_minus_bx**p
        for k in range(ctx.trunc.pd_degree + 1):
            assert table.d(p, 0, k) == expect.coeff(0, (k,)).rows[0][0]
        # d_{p,0,0} = 1 and d_{p,s,0} = 0 for s > 0
        assert table.d(p, 0, 0) == F2.one
        for s in range(1, 4):
            assert table.d(p, s, 0).is_zero()
        # the calculate-c identity, small range (acceptance sweeps it wide)
        for s in range(4):
            assert table.d(p, s, 1) == ctx.theta_at(1, s) * (-p)


def test_cd_e1_has_no_t_terms():
    ctx = CosimpCtx(F1, Trunc(4, 4))
    table = cd_table(ctx, range(-2, 3))
    for p in range(-2, 3):
        for s in range(1, 4):
            assert table.c_poly(p, s) == {}


def test_face_identity_embedding():
    ctx = CosimpCtx(F2, Trunc(3, 3))
    x = hensel_u0(F2, 3)
    emb = face_map(ctx, 1, x)
    assert emb.n_vars == 1
    for (m, _), mat in x.coeffs.items():
        assert emb.coeff(m, (0,)) == mat


def test_face_delta0_on_t():
    ctx = CosimpCtx(F2, Trunc(3, 3))
    t0 = SRE.monomial(F2, 0, ctx.trunc_0v(), 1, (), KMat.identity(F2, 1))
    got = face_map(ctx, 0, t0)
    t1 = SRE.monomial(F2, 1, ctx.trunc, 1, (0,), KMat.identity(F2, 1))
    assert got == ctx.alpha * t1


def test_face_delta0_on_divided_square():
    ctx = CosimpCtx(F2, Trunc(3, 4))
    x_sq = SRE.monomial(F2, 1, ctx.trunc, 0, (2,), KMat.identity(F2, 1))
    got = face_map(ctx, 0, x_sq)
    # (X_2 - X_1)^[2] = X_2^[2] - X_1 X_2 + X_1^[2], times alpha^-2
    binom = pd_binomial(F2, ctx.trunc, 2)
    assert binom.coeff(0, (0, 2)) == KMat.identity(F2, 1)
    assert binom.coeff(0, (1, 1)) == KMat.identity(F2, 1) * -1
    assert binom.coeff(0, (2, 0)) == KMat.identity(F2, 1)
    assert got == binom * ctx.alpha_pow_2v(-2)


def test_face_index_out_of_range():
    ctx = CosimpCtx(F2, Trunc(2, 2))
    x0 = SRE.one(F2, 0, ctx.trunc_0v())
    with pytest.raises(IndexOutOfRange):
        face_map(ctx, 2, x0)
    x1 = SRE.one(F2, 1, ctx.trunc)
    with pytest.raises(IndexOutOfRange):
        face_map(ctx, 3, x1)


@pytest.mark.parametrize("field", [F1, F2], ids=["e1", "e2"])
def test_cosimplicial_identities_on_basis(field):
    """delta^2_j delta^1_i = delta^2_i delta^1_{j-1} for i < j, on t^m."""
    ctx = CosimpCtx(field, Trunc(3, 4))
    tr0 = ctx.trunc_0v()
    for m in range(3):
        tm = SRE.monomial(field, 0, tr0, m, (), KMat.identity(field, 1))
        lhs01 = face_map(ctx, 1, face_map(ctx, 0, tm))
        rhs01 = face_map(ctx, 0, face_map(ctx, 0, tm))
        assert lhs01 == rhs01
        lhs02 = face_map(ctx, 2, face_map(ctx, 0, tm))
        rhs02 = face_map(ctx, 0, face_map(ctx, 1, tm))
        assert lhs02 == rhs02
        lhs12 = face_map(ctx, 2, face_map(ctx, 1, tm))
        rhs12 = face_map(ctx, 1, face_map(ctx, 1, tm))
        assert lhs12 == rhs12


def test_cosimplicial_identity_on_mixed_series():
    ctx = CosimpCtx(F2, Trunc(3, 4))
    tr0 = ctx.trunc_0v()
    x = SRE.from_scalar(F2, 0, tr0, F2.pi) + SRE.monomial(
        F2, 0, tr0, 1, (), KMat.scalar(F2, 1, F2.from_rational(Fraction(1, 2)))
    ) + SRE.monomial(F2, 0, tr0, 2, (), KMat.identity(F2, 1))
    assert face_map(ctx, 1, face_map(ctx, 0, x)) == face_map(
        ctx, 0, face_map(ctx, 0, x)
    )
