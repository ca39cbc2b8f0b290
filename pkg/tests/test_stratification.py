"""Table generation, epsilon assembly, cocycle residuals, near-HT probes."""

from fractions import Fraction

import pytest

from prismstrat.cosimplicial import CosimpCtx, cd_table
from prismstrat.errors import SeedShapeMismatch
from prismstrat.field import field_init
from prismstrat.matrix import KMat
from prismstrat.series import SimplexRingElem as SRE
from prismstrat.series import Trunc
from prismstrat.stratification import (
    Seeds,
    assemble_epsilon,
    check_near_HT,
    cocycle_coefficient_residual,
    cocycle_residual,
    generate_Amn,
    residual_report,
)

F1 = field_init(3, [-3, 1])
F2 = field_init(3, [-3, 0, 1])


def scalar_seeds(field, values):
    return Seeds.of([KMat.scalar(field, 1, field.from_rational(v)) for v in values])


def test_seed_validation():
    with pytest.raises(SeedShapeMismatch):
        Seeds.of([])
    a = KMat.identity(F1, 2)
    b = KMat.identity(F1, 3)
    with pytest.raises(SeedShapeMismatch):
        Seeds.of([a, b])


def test_zero_seeds_give_identity_table():
    ctx = CosimpCtx(F1, Trunc(3, 4))
    table = generate_Amn(scalar_seeds(F1, [0, 0, 0]), ctx, 4)
    for (m, n), mat in table.A.items():
        if (m, n) == (0, 0):
            assert mat == KMat.identity(F1, 1)
        else:
            assert mat.is_zero()
    U = assemble_epsilon(table, ctx)
    assert U == SRE.one(F1, 1, ctx.trunc)


def test_row_zero_is_rising_factorial():
    ctx = CosimpCtx(F2, Trunc(2, 6))
    a01 = KMat.scalar(F2, 1, F2.from_rational(Fraction(2, 5)))
    table = generate_Amn(Seeds.of([a01, KMat.zero(F2, 1)]), ctx, 6)
    acc = KMat.identity(F2, 1)
    beta = F2.beta
    for n in range(7):
        assert table.at(0, n) == acc
        acc = (KMat.scalar(F2, 1, beta * n) + a01) * acc


def test_hand_checked_row_one():
    # e=1, beta=1, A_{0,1} = -1, A_{1,1} = a: A_{1,2} = -2a, A_{1,3} = 0
    ctx = CosimpCtx(F1, Trunc(2, 5))
    a = Fraction(5, 7)
    table = generate_Amn(scalar_seeds(F1, [-1, a]), ctx, 5)
    assert table.at(1, 2) == KMat.scalar(F1, 1, F1.from_rational(-2 * a))
    assert table.at(1, 3).is_zero()
    assert table.at(1, 4).is_zero()


def test_seeds_must_cover_t_order():
    ctx = CosimpCtx(F1, Trunc(3, 3))
    with pytest.raises(SeedShapeMismatch):
        generate_Amn(scalar_seeds(F1, [0, 0]), ctx, 3)


def test_epsilon_unit_constant_term():
    ctx = CosimpCtx(F2, Trunc(3, 4))
    seeds = scalar_seeds(F2, [2, 3, Fraction(1, 2)])
    U = assemble_epsilon(generate_Amn(seeds, ctx, 4), ctx)
    assert U.constant_term() == KMat.identity(F2, 1)
    assert (U * U.invert()) == SRE.one(F2, 1, ctx.trunc)


def test_cocycle_zero_seeds():
    ctx = CosimpCtx(F2, Trunc(4, 4))
    table = generate_Amn(scalar_seeds(F2, [0, 0, 0, 0]), ctx, 4)
    R = cocycle_residual(assemble_epsilon(table, ctx), ctx)
    assert R.is_zero()
    assert residual_report(R)["verdict"] == "ZERO_RESIDUAL"


def test_cocycle_e1_generic_scalar_seed():
    # the desk-scale instance of the sufficiency conjecture at small truncation
    ctx = CosimpCtx(F1, Trunc(3, 5))
    table = generate_Amn(scalar_seeds(F1, [-1, Fraction(5, 7), 0]), ctx, 5)
    R = cocycle_residual(assemble_epsilon(table, ctx), ctx)
    assert R.is_zero()


def test_zero_column_forced():
    # coefficient of X_2^[k] at X_1-degree 0: reproduces the A_{i,0} = 0 argument
    ctx = CosimpCtx(F2, Trunc(3, 4))
    seeds = scalar_seeds(F2, [Fraction(1, 2), 1, Fraction(-2, 3)])
    table = generate_Amn(seeds, ctx, 4)
    R = cocycle_residual(assemble_epsilon(table, ctx), ctx)
    for m in range(3):
        for k in range(5):
            assert R.coeff(m, (0, k)).is_zero()


def test_coefficient_formula_matches_ring_residual():
    ctx = CosimpCtx(F2, Trunc(3, 4))
    seeds = scalar_seeds(F2, [Fraction(1, 2), 1, Fraction(-2, 3)])
    table = generate_Amn(seeds, ctx, 4)
    R = cocycle_residual(assemble_epsilon(table, ctx), ctx)
    cd = cd_table(ctx, range(-(ctx.trunc.pd_degree + 3), ctx.trunc.t_order))
    for m in range(3):
        for k in range(ctx.trunc.pd_degree + 1):
            formula = cocycle_coefficient_residual(table, ctx, cd, m, k)
            for v in range(ctx.trunc.pd_degree - k + 1):
                assert R.coeff(m, (v, k)) == formula.coeff(0, (v,)), (m, k, v)


def test_near_HT_probe_exact_zero():
    a01 = KMat.scalar(F2, 1, -F2.beta)
    rep = check_near_HT(a01, "probe", n_probe=10, threshold=5)
    assert rep["verdict"] == "PASS"
    assert rep["min_valuations"][-1] == "inf"


def test_near_HT_probe_factorial_growth():
    a01 = KMat.identity(F1, 1)
    rep = check_near_HT(a01, "probe", n_probe=200, threshold=40)
    assert rep["verdict"] == "PASS"


def test_near_HT_probe_divergent():
    a01 = KMat.scalar(F1, 1, F1.from_rational(Fraction(1, 3)))
    rep = check_near_HT(a01, "probe", n_probe=30, threshold=0)
    assert rep["verdict"] == "FAIL"


def test_near_HT_exact_weights():
    # integer weights pass
    rep = check_near_HT(
        KMat.zero(F2, 1), "exact_weights", weights=[F2.from_rational(4)]
    )
    assert rep["verdict"] == "PASS"
    assert rep["weights"][0]["nearest_integer"] == 4
    # weight 1/p fails: negative-valuation distance to every integer
    rep = check_near_HT(
        KMat.zero(F1, 1),
        "exact_weights",
        weights=[F1.from_rational(Fraction(1, 3))],
    )
    assert rep["verdict"] == "FAIL"
    # weight with small pi-perturbation passes for e=2 (beta = 2 pi, v=1)
    w = F2.from_coords([2, Fraction(1)])  # 2 + pi, v(w-2) = 1 > -1
    rep = check_near_HT(KMat.zero(F2, 1), "exact_weights", weights=[w])
    assert rep["verdict"] == "PASS"
    # rational weight 5/3 at p=3 fails even with the beta slack
    rep = check_near_HT(
        KMat.zero(F2, 1), "exact_weights", weights=[F2.from_rational(Fraction(5, 3))]
    )
    assert rep["verdict"] == "FAIL"
