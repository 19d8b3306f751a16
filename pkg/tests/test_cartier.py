import math
import random
from concurrent.futures import ThreadPoolExecutor
from itertools import product

import pytest

from picard_cartier.cartier import (
    BASIS_LABELS,
    Convention,
    MatrixFp,
    a_number,
    cartier_image,
    cartier_matrix,
    cartier_monomial_rule,
    frobenius_twist,
    hasse_witt_fast,
    hasse_witt_indices,
    hasse_witt_oracle,
    matmul_fp,
    p_rank,
    rank_fp,
    validate_curve,
)
from picard_cartier.errors import DegenerateCurve, InvalidField, OracleBoundExceeded, SingularCurve
from picard_cartier.fieldpoly import DensePoly, PrimeField, is_prime

X4_PLUS_1 = (1, 0, 0, 0, 1)
H5 = ((0, 0, 1), (0, 0, 0), (3, 0, 0))
H13 = ((4, 0, 0), (0, 2, 0), (0, 0, 4))


def random_curves(p, n, seed):
    rng = random.Random(seed * 1000 + p)
    out = []
    while len(out) < n:
        coeffs = [rng.randrange(-3 * p, 3 * p) for _ in range(4)] + [rng.randrange(1, p)]
        try:
            out.append(validate_curve(p, coeffs))
        except SingularCurve:
            pass
    return out


def binomial_power_coeff(e, d, p):
    """Coefficient of x^d in (x^4 + 1)^e mod p, by the binomial theorem."""
    return math.comb(e, d // 4) % p if d % 4 == 0 and 0 <= d // 4 <= e else 0


def brute_rank(rows, p):
    """log_p of the size of the column space, by enumerating all inputs."""
    n = len(rows[0])
    image = {
        tuple(sum(r[k] * v[k] for k in range(n)) % p for r in rows)
        for v in product(range(p), repeat=n)
    }
    return round(math.log(len(image), p))


def mat_mul(a, b, p):
    return [[sum(a[i][k] * b[k][j] for k in range(3)) % p for j in range(3)] for i in range(3)]


# --- validation --------------------------------------------------------------


def test_validate_x4_plus_1():
    c = validate_curve(5, X4_PLUS_1)
    assert c.genus == 3
    assert c.coefficients == X4_PLUS_1


def test_validate_reduces_coefficients():
    assert validate_curve(5, (6, 5, -10, 0, 11)).coefficients == X4_PLUS_1


@pytest.mark.parametrize(
    "p, f, exc",
    [
        (5, (0, 0, 0, 0, 1), SingularCurve),
        (5, (1, 1, 0, 0, 5), DegenerateCurve),
        (5, (1, 0, 0, 0), DegenerateCurve),
        (3, X4_PLUS_1, InvalidField),
        (9, X4_PLUS_1, InvalidField),
        (2, X4_PLUS_1, InvalidField),
        (7, (1, 2, 1, 0, 0), DegenerateCurve),
        (7, (1, 0, 2, 0, 1), SingularCurve),  # (x^2 + 1)^2
    ],
)
def test_validate_errors(p, f, exc):
    with pytest.raises(exc):
        validate_curve(p, f)


# --- Cartier operator on monomials -------------------------------------------


@pytest.mark.parametrize("j, p, expected", [(4, 5, 0), (3, 5, None), (9, 5, 1), (0, 7, None), (6, 7, 0)])
def test_monomial_rule_examples(j, p, expected):
    assert cartier_monomial_rule(j, p) == expected


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_monomial_rule_agrees_with_coefficient_reading(p):
    F = PrimeField(p)
    for j in range(3 * p):
        xj = DensePoly.monomial(F, j)
        # C(g dx) keeps the coefficient of x^(ps-1) as the coefficient of x^(s-1).
        read = [xj.coeff(p * s - 1).value for s in range(1, 4)]
        expected = [1 if p * s - 1 == j else 0 for s in range(1, 4)]
        assert read == expected
        t = cartier_monomial_rule(j, p)
        if (j + 1) % p:
            assert t is None
        else:
            assert t == (j + 1) // p - 1
        image = cartier_image(xj)
        assert image == (DensePoly(F) if t is None else DensePoly.monomial(F, t))


# --- Hasse-Witt matrix -------------------------------------------------------


def test_fast_worked_examples():
    assert hasse_witt_fast(validate_curve(5, X4_PLUS_1)).rows == H5
    assert hasse_witt_fast(validate_curve(13, X4_PLUS_1)).rows == H13


def test_fast_p7_against_binomial_oracle():
    p = 7
    big, small = (2 * p - 2) // 3, (p - 1) // 3
    expected = (
        (binomial_power_coeff(big, p - 1, p), binomial_power_coeff(big, 2 * p - 1, p), 0),
        (binomial_power_coeff(big, p - 2, p), binomial_power_coeff(big, 2 * p - 2, p), 0),
        (0, 0, binomial_power_coeff(small, p - 1, p)),
    )
    assert expected == ((0, 0, 0), (0, 4, 0), (0, 0, 0))
    curve = validate_curve(p, X4_PLUS_1)
    assert hasse_witt_fast(curve).rows == expected
    assert hasse_witt_oracle(curve).rows == expected


def test_oracle_worked_examples():
    assert hasse_witt_oracle(validate_curve(5, X4_PLUS_1)).rows == H5
    assert hasse_witt_oracle(validate_curve(13, X4_PLUS_1)).rows == H13


def test_oracle_bound():
    curve = validate_curve(103, X4_PLUS_1)
    with pytest.raises(OracleBoundExceeded):
        hasse_witt_oracle(curve)
    assert hasse_witt_oracle(curve, bound=103).rows == hasse_witt_fast(curve).rows


@pytest.mark.parametrize("p", [5, 7, 11, 13, 29, 31])
def test_index_rule_reproduces_displayed_matrix(p):
    displayed = [
        [(p - 1, p - 1), (2 * p - 1, p - 1), (p - 1, 2 * p - 1)],
        [(p - 2, p - 1), (2 * p - 2, p - 1), (p - 2, 2 * p - 1)],
        [(p - 1, p - 2), (2 * p - 1, p - 2), (p - 1, 2 * p - 2)],
    ]
    assert hasse_witt_indices(p) == displayed


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19])
def test_oracle_matches_fast_on_random_curves(p):
    for curve in random_curves(p, 10, seed=1):
        assert hasse_witt_oracle(curve).rows == hasse_witt_fast(curve).rows


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43])
def test_structural_zeros(p):
    zeros_1 = {(0, 2), (1, 2), (2, 0), (2, 1)}
    zeros_2 = {(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)}
    zeros = zeros_1 if p % 3 == 1 else zeros_2
    for curve in random_curves(p, 15, seed=2):
        for m in (hasse_witt_fast(curve), hasse_witt_oracle(curve)):
            assert all(m.rows[i][j] == 0 for i, j in zeros)


# --- Cartier matrix ----------------------------------------------------------


def test_cartier_worked_examples():
    m5 = cartier_matrix(validate_curve(5, X4_PLUS_1))
    assert m5.rows == ((0, 0, 3), (0, 0, 0), (1, 0, 0))
    assert m5.convention is Convention.CARTIER
    assert cartier_matrix(validate_curve(13, X4_PLUS_1)).rows == H13


@pytest.mark.parametrize("p", [5, 11, 17, 23, 29, 41, 47])
def test_image_of_dx_over_y_has_no_dx_over_y_component(p):
    # p = 2 mod 3: C(dx/y) lies in span(dx/y^2, x dx/y^2).
    for curve in random_curves(p, 10, seed=3):
        assert cartier_matrix(curve).rows[2][2] == 0


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19, 23])
def test_cartier_is_transpose_of_hasse_witt(p):
    for curve in random_curves(p, 10, seed=4):
        assert cartier_matrix(curve).rows == hasse_witt_fast(curve).transpose().rows


def test_transpose_flips_convention():
    m = MatrixFp(5, H5)
    assert m.transpose().convention is Convention.CARTIER
    assert m.transpose().transpose() == m
    assert BASIS_LABELS == ("dx/y^2", "x dx/y^2", "dx/y")
    with pytest.raises(ValueError):
        MatrixFp(5, ((1, 2), (3, 4)))


# --- rank, a-number, p-rank --------------------------------------------------


def test_rank_examples():
    assert rank_fp(MatrixFp(5, H5)) == 2
    assert rank_fp(MatrixFp(13, H13)) == 3
    assert rank_fp(MatrixFp(7, ((0,) * 3,) * 3)) == 0
    assert rank_fp([[1, 2], [2, 4], [0, 0]], p=7) == 1


@pytest.mark.parametrize("p", [5, 7, 11])
def test_rank_against_brute_force(p):
    rng = random.Random(p)
    for _ in range(150):
        rows = [[rng.randrange(p) for _ in range(3)] for _ in range(3)]
        if rng.random() < 0.5:  # force dependencies
            rows[2] = [(rows[0][k] * rng.randrange(p) + rows[1][k]) % p for k in range(3)]
        assert rank_fp(MatrixFp(p, rows)) == brute_rank(rows, p)


def test_a_number_examples():
    assert a_number(validate_curve(5, X4_PLUS_1)) == 1
    assert a_number(validate_curve(13, X4_PLUS_1)) == 0
    assert a_number(validate_curve(7, X4_PLUS_1)) == 2


def test_p_rank_examples():
    assert p_rank(validate_curve(13, X4_PLUS_1)) == 3
    h = [list(r) for r in H5]
    cube = mat_mul(mat_mul(h, h, 5), h, 5)
    assert cube == [[0, 0, 3], [0, 0, 0], [4, 0, 0]]
    assert p_rank(validate_curve(5, X4_PLUS_1)) == brute_rank(cube, 5) == 2


def test_frobenius_twist_is_identity_on_prime_field():
    m = MatrixFp(13, ((1, 2, 3), (4, 5, 6), (7, 8, 12)))
    assert frobenius_twist(m) == m
    assert matmul_fp(m, MatrixFp(13, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))) == m


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19, 23, 29, 31])
def test_invariant_inequalities(p):
    for curve in random_curves(p, 20, seed=5):
        h = hasse_witt_fast(curve)
        r = rank_fp(h)
        a, pr = a_number(curve), p_rank(curve)
        assert a == 3 - r
        assert pr <= r
        assert a + pr <= 3
        if p % 3 == 2:
            assert r <= 2 and a >= 1


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19])
def test_scaling_invariance(p):
    rng = random.Random(p)
    for curve in random_curves(p, 10, seed=6):
        c = rng.randrange(1, p)
        scaled = validate_curve(p, [c * v for v in curve.coefficients])
        assert rank_fp(hasse_witt_fast(scaled)) == rank_fp(hasse_witt_fast(curve))
        assert a_number(scaled) == a_number(curve)
        assert p_rank(scaled) == p_rank(curve)


def test_large_prime_fast_path_matches_direct_cartier():
    for p in (1009, 10007):
        assert is_prime(p)
        curve = validate_curve(p, (3, 1, 4, 1, 5))
        assert cartier_matrix(curve).rows == hasse_witt_fast(curve).transpose().rows


def test_concurrent_calls_agree():
    curves = random_curves(31, 16, seed=7)
    serial = [hasse_witt_fast(c) for c in curves]
    with ThreadPoolExecutor(max_workers=4) as pool:
        assert list(pool.map(hasse_witt_fast, curves)) == serial
