"""Exact scalars in Q(sqrt2, sqrt3)(i).

Elements are stored sparsely over the eight-element basis

    1, sqrt2, sqrt3, sqrt6, i, i*sqrt2, i*sqrt3, i*sqrt6

A basis index is a 3-bit number: bit 0 marks a factor sqrt2, bit 1 a factor
sqrt3 and bit 2 a factor i.  The product of two basis elements is then the
basis element with index ``j ^ k`` times an integer (2 for a shared sqrt2,
3 for a shared sqrt3, -1 for a shared i), which keeps multiplication cheap
for the sparse coefficients that dominate jet arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Rational = Fraction

__all__ = ["Rational", "SurdScalar", "ComplexScalar", "ZERO", "ONE", "I", "as_scalar"]


def _basis_product(j: int, k: int) -> tuple[int, int]:
    common = j & k
    c = 1
    if common & 1:
        c *= 2
    if common & 2:
        c *= 3
    if common & 4:
        c = -c
    return j ^ k, c


_MUL = [[_basis_product(j, k) for k in range(8)] for j in range(8)]
# _PARITY[mask][k]: does index k carry an odd number of the generators in mask
_PARITY = [[bin(k & mask).count("1") % 2 == 1 for k in range(8)] for mask in range(8)]
_RADICAL = {0: "", 1: "sqrt(2)", 2: "sqrt(3)", 3: "sqrt(2)*sqrt(3)"}


def _rat(x) -> Rational:
    if isinstance(x, (int, Fraction)) or type(x) is Rational:
        return Rational(x)
    if isinstance(x, _RationalABC):
        return Rational(x.numerator, x.denominator)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class _Sparse:
    """Shared sparse machinery; ``_p`` is a sorted tuple of (index, nonzero rational)."""

    __slots__ = ("_p",)
    _INDICES = range(8)

    def __init__(self, parts=()):
        acc = {}
        for idx, val in parts:
            if idx not in self._INDICES:
                raise ValueError(f"basis index {idx} not allowed in {type(self).__name__}")
            acc[idx] = acc.get(idx, 0) + _rat(val)
        self._p = tuple(sorted((k, v) for k, v in acc.items() if v != 0))

    @classmethod
    def _raw(cls, p):
        obj = object.__new__(cls)
        obj._p = p
        return obj

    @classmethod
    def _from_dict(cls, acc):
        return cls._raw(tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    def _coerce(self, other):
        if isinstance(other, _Sparse):
            return other
        if isinstance(other, (int, Fraction)) or type(other) is Rational:
            v = Rational(other)
            return type(self)._raw(((0, v),) if v else ())
        return NotImplemented

    def _result_type(self, other):
        # mixing a surd with a complex scalar widens to complex
        return ComplexScalar if (type(self) is ComplexScalar or type(other) is ComplexScalar) else SurdScalar

    def is_zero(self) -> bool:
        return not self._p

    def __bool__(self):
        return bool(self._p)

    def component(self, idx: int) -> Rational:
        for k, v in self._p:
            if k == idx:
                return v
        return Rational(0)

    def is_rational(self) -> bool:
        return not self._p or (len(self._p) == 1 and self._p[0][0] == 0)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._p == other._p

    def __hash__(self):
        if self.is_rational():
            return hash(self.component(0))
        return hash(self._p)

    def __neg__(self):
        return type(self)._raw(tuple((k, -v) for k, v in self._p))

    def __pos__(self):
        return self

    def __add__(self, other):
        if not isinstance(other, _Sparse):
            other = self._coerce(other)
            if other is NotImplemented:
                return NotImplemented
        cls = ComplexScalar if (type(self) is ComplexScalar or type(other) is ComplexScalar) else SurdScalar
        p, q = self._p, other._p
        if len(p) == 1 and len(q) == 1 and p[0][0] == q[0][0]:
            v = p[0][1] + q[0][1]
            return cls._raw(((p[0][0], v),) if v else ())
        if not other._p:
            return cls._raw(self._p)
        if not self._p:
            return cls._raw(other._p)
        acc = dict(self._p)
        for k, v in other._p:
            acc[k] = acc[k] + v if k in acc else v
        return cls._from_dict(acc)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, _Sparse):
            other = self._coerce(other)
            if other is NotImplemented:
                return NotImplemented
        cls = ComplexScalar if (type(self) is ComplexScalar or type(other) is ComplexScalar) else SurdScalar
        p, q = self._p, other._p
        if not p or not q:
            return cls._raw(())
        if len(p) == 1 and len(q) == 1:
            j, x = p[0]
            k, y = q[0]
            m, c = _MUL[j][k]
            return cls._raw(((m, c * x * y),))
        acc = {}
        for j, x in p:
            row = _MUL[j]
            for k, y in q:
                m, c = row[k]
                t = c * x * y
                acc[m] = acc[m] + t if m in acc else t
        return cls._from_dict(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inv() ** (-e)
        result = type(self)._raw(((0, Rational(1)),))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def _flip(self, mask: int):
        # Galois action: negate every component whose index shares a bit with mask
        par = _PARITY[mask]
        return type(self)._raw(tuple((k, -v if par[k] else v) for k, v in self._p))

    def _surd_str(self, pairs) -> str:
        out = []
        for k, v in pairs:
            rad = _RADICAL[k & 3]
            iu = "i" if k & 4 else ""
            factors = [f for f in (iu, rad) if f]
            if not factors:
                out.append(str(v))
            elif v == 1:
                out.append("*".join(factors))
            elif v == -1:
                out.append("-1*" + "*".join(factors))
            else:
                out.append(str(v) + "*" + "*".join(factors))
        return out

    def __str__(self):
        """Grammar-compatible text; multi-component values are parenthesised."""
        if not self._p:
            return "0"
        parts = self._surd_str(self._p)
        if len(parts) == 1:
            return parts[0]
        text = parts[0]
        for part in parts[1:]:
            text += " - " + part[1:] if part.startswith("-") else " + " + part
        return "(" + text + ")"

    def __repr__(self):
        return f"{type(self).__name__}({str(self)!r})"


class SurdScalar(_Sparse):
    """a + b*sqrt2 + c*sqrt3 + d*sqrt6 with rational a, b, c, d."""

    __slots__ = ()
    _INDICES = range(4)

    @classmethod
    def of(cls, a=0, b=0, c=0, d=0) -> "SurdScalar":
        return cls(((0, a), (1, b), (2, c), (3, d)))

    @property
    def a(self):
        return self.component(0)

    @property
    def b(self):
        return self.component(1)

    @property
    def c(self):
        return self.component(2)

    @property
    def d(self):
        return self.component(3)

    def coords(self) -> tuple:
        return tuple(self.component(k) for k in range(4))

    def galois(self, flip_sqrt2: bool, flip_sqrt3: bool) -> "SurdScalar":
        return self._flip((1 if flip_sqrt2 else 0) | (2 if flip_sqrt3 else 0))

    def inv(self) -> "SurdScalar":
        """Inverse through the Galois conjugates.

        x * s2(x) lies in Q(sqrt3); multiplying that by its sqrt3-conjugate
        leaves a rational norm.
        """
        if not self._p:
            raise ZeroDivisionError("inverse of zero surd")
        if self.is_rational():
            return SurdScalar._raw(((0, 1 / self._p[0][1]),))
        x2 = self._flip(1)
        y = self * x2
        y3 = y._flip(2)
        norm = (y * y3).component(0)
        return x2 * y3 * SurdScalar._raw(((0, 1 / norm),))


class ComplexScalar(_Sparse):
    """re + i*im with re, im in Q(sqrt2, sqrt3)."""

    __slots__ = ()

    @classmethod
    def from_parts(cls, re=0, im=0) -> "ComplexScalar":
        re = re if isinstance(re, _Sparse) else SurdScalar.of(re)
        im = im if isinstance(im, _Sparse) else SurdScalar.of(im)
        return cls(tuple(re._p) + tuple((k | 4, v) for k, v in im._p))

    @property
    def re(self) -> SurdScalar:
        return SurdScalar._raw(tuple((k, v) for k, v in self._p if k < 4))

    @property
    def im(self) -> SurdScalar:
        return SurdScalar._raw(tuple((k & 3, v) for k, v in self._p if k >= 4))

    def conj(self) -> "ComplexScalar":
        return self._flip(4)

    def abs2(self) -> SurdScalar:
        return SurdScalar._raw((self * self.conj())._p)

    def inv(self) -> "ComplexScalar":
        if not self._p:
            raise ZeroDivisionError("inverse of zero scalar")
        if len(self._p) == 1:
            k, v = self._p[0]
            if k == 0:
                return ComplexScalar._raw(((0, 1 / v),))
            if k == 4:
                return ComplexScalar._raw(((4, -1 / v),))
        return self.conj() * self.abs2().inv()


def as_scalar(x) -> ComplexScalar:
    if isinstance(x, ComplexScalar):
        return x
    if isinstance(x, SurdScalar):
        return ComplexScalar._raw(x._p)
    v = _rat(x)
    return ComplexScalar._raw(((0, v),) if v else ())


ZERO = ComplexScalar._raw(())
ONE = ComplexScalar._raw(((0, Rational(1)),))
I = ComplexScalar._raw(((4, Rational(1)),))
SQRT2 = ComplexScalar._raw(((1, Rational(1)),))
SQRT3 = ComplexScalar._raw(((2, Rational(1)),))


def surd_mul(x: SurdScalar, y: SurdScalar) -> SurdScalar:
    return x * y


def surd_inv(x: SurdScalar) -> SurdScalar:
    return x.inv()


def complex_inv(x: ComplexScalar) -> ComplexScalar:
    return x.inv()
