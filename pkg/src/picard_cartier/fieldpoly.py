"""Prime-field scalars, dense univariate and sparse bivariate polynomials.

Coefficients are always kept as canonical residues in ``[0, p)``.  The
polynomial classes store plain ``int`` residues internally and hand out
:class:`FieldElement` objects at their public accessors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import FieldMismatch, InvalidField

# Degree of the zero polynomial.  Deliberately not an int.
NEG_INF = float("-inf")

# Miller-Rabin with these bases is deterministic for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3_317_044_064_679_887_385_961_981

# Below this operand length schoolbook multiplication beats packing.
_KRONECKER_CUTOFF = 8


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for ``n < 3.3e24``."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    if n >= _MR_LIMIT:
        raise ValueError(f"primality of {n} is outside the deterministic range")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
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


@dataclass(frozen=True)
class PrimeField:
    """The field of residues modulo a prime ``p > 3``."""

    p: int

    def __post_init__(self):
        p = self.p
        if not isinstance(p, int) or isinstance(p, bool):
            raise InvalidField(f"characteristic must be an integer, got {p!r}")
        if p <= 3:
            raise InvalidField(f"characteristic must exceed 3, got {p}")
        try:
            prime = is_prime(p)
        except ValueError as exc:
            raise InvalidField(str(exc)) from None
        if not prime:
            raise InvalidField(f"{p} is not prime")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def __repr__(self):
        return f"GF({self.p})"


Scalar = Union["FieldElement", int]


class FieldElement:
    """An element of a :class:`PrimeField`.  Immutable."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        object.__setattr__(self, "value", int(value) % field.p)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other: Scalar) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"cannot combine elements of {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def _make(self, value: int) -> "FieldElement":
        return FieldElement(value, self.field)

    def __add__(self, other: Scalar) -> "FieldElement":
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return self._make(self.value + v)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> "FieldElement":
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return self._make(self.value - v)

    def __rsub__(self, other: Scalar) -> "FieldElement":
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return self._make(v - self.value)

    def __mul__(self, other: Scalar) -> "FieldElement":
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return self._make(self.value * v)

    __rmul__ = __mul__

    def __neg__(self) -> "FieldElement":
        return self._make(-self.value)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self.field}")
        return self._make(pow(self.value, -1, self.field.p))

    def __truediv__(self, other: Scalar) -> "FieldElement":
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return self * self._make(v).inverse()

    def __rtruediv__(self, other: Scalar) -> "FieldElement":
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return self._make(v) * self.inverse()

    def __pow__(self, e: int) -> "FieldElement":
        if e < 0:
            return self.inverse() ** (-e)
        # Binary exponentiation; 0**0 == 1.
        result, base = 1, self.value
        p = self.field.p
        while e:
            if e & 1:
                result = result * base % p
            base = base * base % p
            e >>= 1
        return self._make(result)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.p))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"


def ff_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def ff_pow(a: FieldElement, e: int) -> FieldElement:
    if e < 0:
        raise ValueError("exponent must be non-negative")
    return a**e


# ---------------------------------------------------------------------------
# Residue-list kernels.  Inputs are lists of canonical residues mod p.


def _strip(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _mul_school(a: list[int], b: list[int], p: int, n: int | None) -> list[int]:
    la, lb = len(a), len(b)
    size = la + lb - 1 if n is None else min(la + lb - 1, n + 1)
    out = [0] * size
    for i, ai in enumerate(a):
        if ai == 0 or i >= size:
            continue
        for j in range(min(lb, size - i)):
            out[i + j] += ai * b[j]
    return [c % p for c in out]


def _mul_kronecker(a: list[int], b: list[int], p: int, n: int | None) -> list[int]:
    # Pack each operand into one big integer with slots wide enough that no
    # convolution sum spills into its neighbour, multiply, unpack.
    bound = min(len(a), len(b)) * (p - 1) ** 2
    width = (bound.bit_length() + 8) // 8
    size = len(a) + len(b) - 1 if n is None else min(len(a) + len(b) - 1, n + 1)
    pa = int.from_bytes(b"".join(c.to_bytes(width, "little") for c in a), "little")
    pb = int.from_bytes(b"".join(c.to_bytes(width, "little") for c in b), "little")
    raw = (pa * pb).to_bytes((len(a) + len(b)) * width, "little")
    return [int.from_bytes(raw[k * width:(k + 1) * width], "little") % p for k in range(size)]


def _mul_residues(a: list[int], b: list[int], p: int, n: int | None = None) -> list[int]:
    if not a or not b or (n is not None and n < 0):
        return []
    if n is not None:
        a, b = a[: n + 1], b[: n + 1]
    if min(len(a), len(b)) < _KRONECKER_CUTOFF:
        out = _mul_school(a, b, p, n)
    else:
        out = _mul_kronecker(a, b, p, n)
    return _strip(out)


def _divmod_residues(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - db, 0)
    for k in range(len(a) - 1 - db, -1, -1):
        c = r[k + db] * inv_lead % p
        q[k] = c
        if c:
            for i in range(db + 1):
                r[k + i] = (r[k + i] - c * b[i]) % p
    return _strip(q), _strip(r[:db])


# ---------------------------------------------------------------------------


class DensePoly:
    """Univariate polynomial over F_p; ``coeffs[i]`` is the coefficient of x^i.

    The zero polynomial has an empty coefficient tuple and degree ``NEG_INF``.
    """

    __slots__ = ("field", "_c")

    def __init__(self, field: PrimeField, coeffs: Iterable[Scalar] = ()):
        p = field.p
        c = []
        for v in coeffs:
            if isinstance(v, FieldElement):
                if v.field != field:
                    raise FieldMismatch(f"coefficient from {v.field} in polynomial over {field}")
                c.append(v.value)
            else:
                c.append(int(v) % p)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "_c", tuple(_strip(c)))

    @classmethod
    def _raw(cls, field: PrimeField, residues: list[int]) -> "DensePoly":
        # Trusted constructor: residues already canonical and stripped.
        obj = cls.__new__(cls)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "_c", tuple(residues))
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("DensePoly is immutable")

    @classmethod
    def monomial(cls, field: PrimeField, degree: int, c: Scalar = 1) -> "DensePoly":
        return cls(field, [0] * degree + [c])

    @property
    def residues(self) -> tuple[int, ...]:
        return self._c

    @property
    def coeffs(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(v, self.field) for v in self._c)

    @property
    def degree(self) -> int | float:
        return len(self._c) - 1 if self._c else NEG_INF

    def is_zero(self) -> bool:
        return not self._c

    def coeff(self, i: int) -> FieldElement:
        return FieldElement(self._c[i] if 0 <= i < len(self._c) else 0, self.field)

    def leading(self) -> FieldElement:
        if not self._c:
            raise ValueError("zero polynomial has no leading coefficient")
        return FieldElement(self._c[-1], self.field)

    def monic(self) -> "DensePoly":
        if not self._c:
            return self
        inv = pow(self._c[-1], -1, self.field.p)
        p = self.field.p
        return DensePoly._raw(self.field, [c * inv % p for c in self._c])

    def truncate(self, n: int) -> "DensePoly":
        """Drop every term of degree greater than ``n``."""
        return DensePoly._raw(self.field, _strip(list(self._c[: max(n + 1, 0)])))

    def scale(self, c: Scalar) -> "DensePoly":
        return self * DensePoly(self.field, [c])

    def derivative(self) -> "DensePoly":
        p = self.field.p
        return DensePoly._raw(self.field, _strip([i * c % p for i, c in enumerate(self._c)][1:]))

    def __call__(self, x: Scalar) -> FieldElement:
        p = self.field.p
        xv = int(x) % p
        acc = 0
        for c in reversed(self._c):
            acc = (acc * xv + c) % p
        return FieldElement(acc, self.field)

    def _check(self, other: "DensePoly") -> None:
        if not isinstance(other, DensePoly):
            raise TypeError(f"expected DensePoly, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatch(f"polynomials over {self.field} and {other.field}")

    def __add__(self, other: "DensePoly") -> "DensePoly":
        self._check(other)
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        p = self.field.p
        out = list(a)
        for i, v in enumerate(b):
            out[i] = (out[i] + v) % p
        return DensePoly._raw(self.field, _strip(out))

    def __neg__(self) -> "DensePoly":
        p = self.field.p
        return DensePoly._raw(self.field, [(-c) % p for c in self._c])

    def __sub__(self, other: "DensePoly") -> "DensePoly":
        return self + (-other)

    def __mul__(self, other: "DensePoly") -> "DensePoly":
        return poly_mul(self, other)

    def __pow__(self, e: int) -> "DensePoly":
        return poly_pow(self, e)

    def __divmod__(self, other: "DensePoly") -> tuple["DensePoly", "DensePoly"]:
        self._check(other)
        q, r = _divmod_residues(list(self._c), list(other._c), self.field.p)
        return DensePoly._raw(self.field, q), DensePoly._raw(self.field, r)

    def __floordiv__(self, other: "DensePoly") -> "DensePoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "DensePoly") -> "DensePoly":
        return divmod(self, other)[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensePoly):
            return NotImplemented
        return self.field == other.field and self._c == other._c

    def __hash__(self):
        return hash((self.field.p, self._c))

    def __repr__(self):
        if not self._c:
            return f"0 over {self.field}"
        parts = []
        for i in range(len(self._c) - 1, -1, -1):
            c = self._c[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts) + f" over {self.field}"


def poly_mul(a: DensePoly, b: DensePoly, truncation: int | None = None) -> DensePoly:
    """Product of ``a`` and ``b``, keeping only degrees ``<= truncation`` if given."""
    a._check(b)
    return DensePoly._raw(a.field, _mul_residues(list(a._c), list(b._c), a.field.p, truncation))


def poly_pow(f: DensePoly, e: int, truncation: int | None = None) -> DensePoly:
    """``f**e`` by square-and-multiply, truncating after every product."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    p = f.field.p
    result = [1] if truncation is None or truncation >= 0 else []
    base = list(f._c) if truncation is None else _strip(list(f._c[: truncation + 1]))
    while e:
        if e & 1:
            result = _mul_residues(result, base, p, truncation)
        e >>= 1
        if e:
            base = _mul_residues(base, base, p, truncation)
    return DensePoly._raw(f.field, result)


def poly_derivative(f: DensePoly) -> DensePoly:
    return f.derivative()


def poly_gcd(a: DensePoly, b: DensePoly) -> DensePoly:
    """Monic gcd by the Euclidean algorithm."""
    a._check(b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    p = a.field.p
    x, y = list(a._c), list(b._c)
    while y:
        x, y = y, _divmod_residues(x, y, p)[1]
    return DensePoly._raw(a.field, x).monic()


def is_squarefree(f: DensePoly) -> bool:
    """True iff ``f`` has no repeated root over the algebraic closure."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no squarefree decomposition")
    if f.degree == 0:
        return True
    df = f.derivative()
    if df.is_zero():
        # f is a p-th power
        return False
    return poly_gcd(f, df).degree == 0


# ---------------------------------------------------------------------------


Monomial = tuple[int, int]


class BivariatePoly:
    """Sparse polynomial in x, y over F_p keyed by ``(x_degree, y_degree)``.

    Only nonzero coefficients are stored.  ``terms`` exposes them as field
    elements; ``residues`` as plain ints.
    """

    __slots__ = ("field", "_t")

    def __init__(self, field: PrimeField, terms: Mapping[Monomial, Scalar] | None = None):
        p = field.p
        t = {}
        for (i, j), v in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in monomial {(i, j)}")
            if isinstance(v, FieldElement):
                if v.field != field:
                    raise FieldMismatch(f"coefficient from {v.field} in polynomial over {field}")
                v = v.value
            v = int(v) % p
            if v:
                t[(int(i), int(j))] = v
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "_t", t)

    @classmethod
    def _raw(cls, field: PrimeField, t: dict[Monomial, int]) -> "BivariatePoly":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "_t", t)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("BivariatePoly is immutable")

    @classmethod
    def lift(cls, f: DensePoly) -> "BivariatePoly":
        """View a univariate polynomial as a bivariate one of y-degree 0."""
        return cls._raw(f.field, {(i, 0): c for i, c in enumerate(f.residues) if c})

    @classmethod
    def picard(cls, f: DensePoly) -> "BivariatePoly":
        """The defining polynomial ``y^3 - f(x)``."""
        p = f.field.p
        t = {(i, 0): (-c) % p for i, c in enumerate(f.residues) if c}
        t[(0, 3)] = 1
        return cls._raw(f.field, t)

    @property
    def residues(self) -> Mapping[Monomial, int]:
        return MappingProxyType(self._t)

    @property
    def terms(self) -> dict[Monomial, FieldElement]:
        return {k: FieldElement(v, self.field) for k, v in self._t.items()}

    def __len__(self):
        return len(self._t)

    def coeff(self, i: int, j: int) -> FieldElement:
        return FieldElement(self._t.get((i, j), 0), self.field)

    def y_slice(self, j: int) -> DensePoly:
        """The coefficient of ``y**j`` as a polynomial in x."""
        items = {i: v for (i, jj), v in self._t.items() if jj == j}
        if not items:
            return DensePoly._raw(self.field, [])
        c = [0] * (max(items) + 1)
        for i, v in items.items():
            c[i] = v
        return DensePoly._raw(self.field, c)

    def _check(self, other: "BivariatePoly") -> None:
        if not isinstance(other, BivariatePoly):
            raise TypeError(f"expected BivariatePoly, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatch(f"polynomials over {self.field} and {other.field}")

    def __add__(self, other: "BivariatePoly") -> "BivariatePoly":
        self._check(other)
        p = self.field.p
        t = dict(self._t)
        for k, v in other._t.items():
            s = (t.get(k, 0) + v) % p
            if s:
                t[k] = s
            else:
                t.pop(k, None)
        return BivariatePoly._raw(self.field, t)

    def __neg__(self) -> "BivariatePoly":
        p = self.field.p
        return BivariatePoly._raw(self.field, {k: (-v) % p for k, v in self._t.items()})

    def __sub__(self, other: "BivariatePoly") -> "BivariatePoly":
        return self + (-other)

    def __mul__(self, other: "BivariatePoly") -> "BivariatePoly":
        self._check(other)
        ystep = _y_step(self._t, other._t)
        grid = _grid_mul(_to_grid(self._t, ystep), _to_grid(other._t, ystep), self.field.p)
        return BivariatePoly._raw(self.field, _from_grid(grid, ystep))

    def __pow__(self, e: int) -> "BivariatePoly":
        return biv_pow(self, e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self.field == other.field and self._t == other._t

    def __hash__(self):
        return hash((self.field.p, frozenset(self._t.items())))

    def __repr__(self):
        return f"BivariatePoly({len(self._t)} terms over {self.field})"


# Dense grid form used for products: a 2-D int64 array indexed [y / ystep, x].
# ``ystep`` is a common divisor of every y-degree present, so that sparse-in-y
# polynomials such as y^3 - f(x) do not pay for empty rows.


def _y_step(*terms: Mapping[Monomial, int]) -> int:
    return math.gcd(*(j for t in terms for _, j in t)) or 1


def _to_grid(t: Mapping[Monomial, int], ystep: int = 1) -> np.ndarray:
    if not t:
        return np.zeros((0, 0), dtype=np.int64)
    idx = np.array(list(t), dtype=np.int64)
    idx[:, 1] //= ystep
    grid = np.zeros((idx[:, 1].max() + 1, idx[:, 0].max() + 1), dtype=np.int64)
    grid[idx[:, 1], idx[:, 0]] = list(t.values())
    return grid


def _from_grid(grid: np.ndarray, ystep: int = 1) -> dict[Monomial, int]:
    ys, xs = np.nonzero(grid)
    keys = zip(xs.tolist(), (ys * ystep).tolist())
    return dict(zip(keys, grid[ys, xs].tolist()))


def _pack(grid: np.ndarray, stride: int, width: int) -> int:
    rows, cols = grid.shape
    if width <= 8:
        flat = np.zeros((rows, stride), dtype="<u8")
        flat[:, :cols] = grid
        raw = flat.reshape(-1).view(np.uint8).reshape(-1, 8)[:, :width].tobytes()
    else:
        raw = bytearray(rows * stride * width)
        for (j, i), v in np.ndenumerate(grid):
            off = (j * stride + i) * width
            raw[off:off + width] = int(v).to_bytes(width, "little")
    return int.from_bytes(raw, "little")


def _unpack(value: int, nslots: int, width: int, p: int) -> np.ndarray:
    raw = value.to_bytes(nslots * width, "little")
    if width <= 8:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(nslots, width)
        acc = np.zeros(nslots, dtype=np.uint64)
        for k in range(width):
            acc |= b[:, k].astype(np.uint64) << np.uint64(8 * k)
        return (acc % np.uint64(p)).astype(np.int64)
    return np.array(
        [int.from_bytes(raw[k * width:(k + 1) * width], "little") % p for k in range(nslots)],
        dtype=np.int64,
    )


def _grid_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # 2-D Kronecker substitution: slot (j, i) sits at j*stride + i where the
    # stride is the x-width of the product, so rows never overlap.
    if a.size == 0 or b.size == 0:
        return np.zeros((0, 0), dtype=np.int64)
    stride = a.shape[1] + b.shape[1] - 1
    bound = min(np.count_nonzero(a), np.count_nonzero(b)) * (p - 1) ** 2
    width = max((bound.bit_length() + 7) // 8, 1)
    rows = a.shape[0] + b.shape[0] - 1
    prod = _pack(a, stride, width) * _pack(b, stride, width)
    return _unpack(prod, rows * stride, width, p).reshape(rows, stride)


def biv_pow(F: BivariatePoly, e: int) -> BivariatePoly:
    """``F**e`` by square-and-multiply."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    p = F.field.p
    ystep = _y_step(F._t)
    result = np.ones((1, 1), dtype=np.int64)
    base = _to_grid(F._t, ystep)
    while e:
        if e & 1:
            result = _grid_mul(result, base, p)
        e >>= 1
        if e:
            base = _grid_mul(base, base, p)
    return BivariatePoly._raw(F.field, _from_grid(result, ystep))


def coeff(f: DensePoly | BivariatePoly, index) -> FieldElement:
    """Coefficient at ``index`` (an int for DensePoly, ``(i, j)`` for BivariatePoly)."""
    if isinstance(f, BivariatePoly):
        i, j = index
        return f.coeff(i, j)
    return f.coeff(index)
