"""Hasse-Witt and Cartier matrices, a-number and p-rank of Picard curves.

A Picard curve here is ``y^3 = f(x)`` with ``f`` a squarefree quartic over
F_p, ``p > 3``.  Holomorphic differentials are expressed in the fixed basis

    z1 = dx/y^2,   z2 = x dx/y^2,   z3 = dx/y

and every matrix emitted uses that order.  Three independent routes produce
the matrix:

* :func:`hasse_witt_fast` reads four or five coefficients of a single power
  of ``f`` (the shortcut valid because ``binom(p-1, k) = (-1)^k mod p``).
* :func:`hasse_witt_oracle` expands ``(y^3 - f)^(p-1)`` in full and picks
  coefficients with the mixed ``(p-1, p-1)`` derivative index rule.
* :func:`cartier_matrix` pushes each basis differential through the Cartier
  operator directly, one monomial ``x^j dx`` at a time.

The first two agree in the Hasse-Witt convention, where row ``i`` holds the
coordinates of the image of ``z_i``.  The third is built column-wise and
equals the transpose.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateCurve, OracleBoundExceeded, SingularCurve
from .fieldpoly import (
    BivariatePoly,
    DensePoly,
    FieldElement,
    PrimeField,
    biv_pow,
    is_squarefree,
    poly_pow,
)

GENUS = 3
DEFAULT_ORACLE_BOUND = 101

# (power of x, pole order in y, label) for each basis differential x^a dx / y^b.
BASIS = ((0, 2, "dx/y^2"), (1, 2, "x dx/y^2"), (0, 1, "dx/y"))
BASIS_LABELS = tuple(label for _, _, label in BASIS)


class Convention(enum.Enum):
    HASSE_WITT = "hasse-witt"
    CARTIER = "cartier"


@dataclass(frozen=True)
class PicardCurve:
    field: PrimeField
    f: DensePoly

    genus = GENUS

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def coefficients(self) -> tuple[int, ...]:
        """The five residues of ``f``, constant term first."""
        return self.f.residues


def validate_curve(p: int, f_coeffs: Sequence[int]) -> PicardCurve:
    """Build a :class:`PicardCurve` from ``p`` and constant-first coefficients.

    Coefficients may be any integers; they are reduced mod ``p``.

    Raises InvalidField, DegenerateCurve or SingularCurve.
    """
    field = PrimeField(p)
    coeffs = [int(c) for c in f_coeffs]
    if len(coeffs) != 5:
        raise DegenerateCurve(f"expected 5 coefficients c0..c4, got {len(coeffs)}")
    f = DensePoly(field, coeffs)
    if f.degree != 4:
        raise DegenerateCurve(f"leading coefficient {coeffs[4]} vanishes mod {p}")
    if not is_squarefree(f):
        raise SingularCurve(f"f = {f} has a repeated root")
    return PicardCurve(field, f)


@dataclass(frozen=True)
class MatrixFp:
    """A 3x3 matrix of residues mod ``p`` tagged with its convention.

    ``HASSE_WITT``: row i holds the coordinates of C(z_i).
    ``CARTIER``: column j holds the coordinates of C(z_j).
    """

    p: int
    rows: tuple[tuple[int, ...], ...]
    convention: Convention = Convention.HASSE_WITT

    def __post_init__(self):
        rows = tuple(tuple(int(v) % self.p for v in row) for row in self.rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("MatrixFp must be 3x3")
        object.__setattr__(self, "rows", rows)

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.rows[i][j], PrimeField(self.p))

    def transpose(self) -> "MatrixFp":
        flipped = Convention.CARTIER if self.convention is Convention.HASSE_WITT else Convention.HASSE_WITT
        return MatrixFp(self.p, tuple(zip(*self.rows)), flipped)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def same_entries(self, other: "MatrixFp") -> bool:
        return self.p == other.p and self.rows == other.rows


# ---------------------------------------------------------------------------
# Cartier operator on monomials


def cartier_monomial_rule(j: int, p: int) -> int | None:
    """Exponent ``s - 1`` with ``C(x^j dx) = x^(s-1) dx`` when ``j + 1 = p s``.

    Returns None when ``p`` does not divide ``j + 1`` (the image is zero).
    """
    if j < 0:
        raise ValueError("exponent must be non-negative")
    s, r = divmod(j + 1, p)
    return s - 1 if r == 0 else None


def cartier_image(g: DensePoly) -> DensePoly:
    """Apply C to ``g(x) dx`` and return ``h`` with ``C(g dx) = h dx``.

    Coefficients are p-th roots of those of ``g``; over F_p that is the
    identity.
    """
    p = g.field.p
    out: dict[int, int] = {}
    for j, c in enumerate(g.residues):
        if c:
            t = cartier_monomial_rule(j, p)
            if t is not None:
                out[t] = c
    return DensePoly(g.field, [out.get(t, 0) for t in range(max(out, default=-1) + 1)])


# ---------------------------------------------------------------------------
# Hasse-Witt matrix


def _entry_table(p: int) -> dict[tuple[int, int], tuple[int, int]]:
    """Nonzero entries of H as ``(row, col) -> (power of f, x-degree)``."""
    if p % 3 == 1:
        big, small = (2 * p - 2) // 3, (p - 1) // 3
        return {
            (0, 0): (big, p - 1),
            (0, 1): (big, 2 * p - 1),
            (1, 0): (big, p - 2),
            (1, 1): (big, 2 * p - 2),
            (2, 2): (small, p - 1),
        }
    small, big = (p - 2) // 3, (2 * p - 1) // 3
    return {
        (0, 2): (small, p - 1),
        (1, 2): (small, p - 2),
        (2, 0): (big, p - 1),
        (2, 1): (big, 2 * p - 1),
    }


def hasse_witt_fast(curve: PicardCurve) -> MatrixFp:
    """Hasse-Witt matrix from coefficients of ``f^e`` for one or two exponents ``e``."""
    p = curve.p
    table = _entry_table(p)
    powers = {
        e: poly_pow(curve.f, e, truncation=2 * p - 1)
        for e in sorted({e for e, _ in table.values()})
    }
    rows = [[0] * 3 for _ in range(3)]
    for (i, j), (e, deg) in table.items():
        rows[i][j] = powers[e].coeff(deg).value
    return MatrixFp(p, tuple(map(tuple, rows)), Convention.HASSE_WITT)


def nabla_index(p: int, source: tuple[int, int], target: tuple[int, int]) -> tuple[int, int]:
    """Index ``(ip + p - 1 - a, jp + p - 1 - b)`` of the F^(p-1) coefficient
    that the mixed derivative sends to ``x^i y^j`` after multiplying by
    ``x^a y^b``.
    """
    a, b = source
    i, j = target
    return i * p + p - 1 - a, j * p + p - 1 - b


# Numerator monomial (x^a y^b) of each basis element written as 3 x^a y^b dx / F_y.
_NUMERATORS = ((0, 0), (1, 0), (0, 1))


def hasse_witt_indices(p: int) -> list[list[tuple[int, int]]]:
    """The ``(x-degree, y-degree)`` of F^(p-1) read for each entry of H."""
    return [[nabla_index(p, src, tgt) for tgt in _NUMERATORS] for src in _NUMERATORS]


def hasse_witt_oracle(curve: PicardCurve, bound: int = DEFAULT_ORACLE_BOUND) -> MatrixFp:
    """Hasse-Witt matrix from the full bivariate expansion of ``(y^3 - f)^(p-1)``.

    Costs O(p^2) terms; refuses primes above ``bound``.
    """
    p = curve.p
    if p > bound:
        raise OracleBoundExceeded(f"p = {p} exceeds the oracle bound {bound}")
    G = biv_pow(BivariatePoly.picard(curve.f), p - 1)
    rows = tuple(tuple(G.coeff(i, j).value for i, j in row) for row in hasse_witt_indices(p))
    return MatrixFp(p, rows, Convention.HASSE_WITT)


def _basis_position(x_power: int, pole: int) -> int:
    for k, (a, b, _) in enumerate(BASIS):
        if (a, b) == (x_power, pole):
            return k
    raise ArithmeticError(f"x^{x_power} dx / y^{pole} is not a basis differential")


def cartier_of_basis(
    curve: PicardCurve, a: int, b: int, powers: dict[int, DensePoly] | None = None
) -> list[int]:
    """Coordinates of C(x^a dx / y^b) in the basis.

    With ``m`` the least positive integer making ``m p - b = 3k``,
    ``x^a dx / y^b = y^(-m p) x^a f^k dx`` and so
    ``C(x^a dx / y^b) = y^(-m) C(x^a f^k dx)``.
    """
    p = curve.p
    m = next(m for m in (1, 2, 3) if (m * p - b) % 3 == 0)
    k = (m * p - b) // 3
    powers = {} if powers is None else powers
    if k not in powers:
        powers[k] = poly_pow(curve.f, k)
    g = powers[k] * DensePoly.monomial(curve.field, a)
    image = cartier_image(g)
    coords = [0, 0, 0]
    for t, c in enumerate(image.residues):
        if c:
            coords[_basis_position(t, m)] = c
    return coords


def cartier_matrix(curve: PicardCurve) -> MatrixFp:
    """Matrix of C on the basis; column ``j`` is C(z_j)."""
    powers: dict[int, DensePoly] = {}
    cols = [cartier_of_basis(curve, a, b, powers) for a, b, _ in BASIS]
    return MatrixFp(curve.p, tuple(zip(*cols)), Convention.CARTIER)


# ---------------------------------------------------------------------------
# Linear algebra over F_p


def rank_fp(m: MatrixFp | Iterable[Iterable[int]], p: int | None = None) -> int:
    """Rank over F_p by Gaussian elimination.

    Accepts a :class:`MatrixFp` or any rectangular nested sequence plus ``p``.
    """
    if isinstance(m, MatrixFp):
        p = m.p
        rows = [list(r) for r in m.rows]
    else:
        if p is None:
            raise ValueError("p is required for a plain nested sequence")
        rows = [[int(v) % p for v in r] for r in m]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        prow = [v * inv % p for v in rows[rank]]
        rows[rank] = prow
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                c = rows[r][col]
                rows[r] = [(v - c * w) % p for v, w in zip(rows[r], prow)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def matmul_fp(a: MatrixFp, b: MatrixFp) -> MatrixFp:
    p = a.p
    rows = tuple(
        tuple(sum(a.rows[i][k] * b.rows[k][j] for k in range(3)) % p for j in range(3))
        for i in range(3)
    )
    return MatrixFp(p, rows, a.convention)


def frobenius_twist(m: MatrixFp) -> MatrixFp:
    """Entrywise p-th power (the identity on prime-field entries)."""
    return MatrixFp(m.p, tuple(tuple(pow(v, m.p, m.p) for v in r) for r in m.rows), m.convention)


def a_number(curve: PicardCurve) -> int:
    """Dimension of the kernel of the Cartier operator on holomorphic differentials."""
    return GENUS - rank_fp(cartier_matrix(curve))


def p_rank(curve: PicardCurve) -> int:
    """Stable rank ``rank(H H^(p) H^(p^2))`` of the Hasse-Witt matrix."""
    h = hasse_witt_fast(curve)
    h1 = frobenius_twist(h)
    h2 = frobenius_twist(h1)
    return rank_fp(matmul_fp(matmul_fp(h, h1), h2))
