"""Sparse truncated multivariate power series ("jets") at the origin.

A jet over a :class:`VarSpace` stores its monomials in a dict keyed by a
packed integer: one 8-bit field per variable with the total degree in the
top field.  Adding two keys multiplies the monomials, and sorting keys sorts
by degree first, so truncation becomes a single comparison.

Each jet carries ``order`` (coefficients are correct through that total
degree and nothing higher is stored) and ``exact`` (the stored terms are the
complete polynomial).  Derivatives of exact jets keep their order; any other
derivative loses one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import groupby
from typing import Iterable, Mapping, Sequence

from . import linalg
from .errors import (
    ConstantTermError,
    SingularError,
    SpaceMismatchError,
    UnknownVariableError,
    WorkingOrderExhausted,
)
from .scalars import _MUL, ONE, ZERO, ComplexScalar, as_scalar

HOLOMORPHIC = "holomorphic"
ANTIHOLOMORPHIC = "antiholomorphic"
REAL = "real"

_W = 8
_FIELD = (1 << _W) - 1
MAX_ORDER = 200
_RESERVED = {"i", "conj", "sqrt"}


@dataclass(frozen=True)
class VarSpace:
    """Ordered variables: holomorphic z_j, their conjugates, then real variables."""

    holo: tuple[str, ...] = ()
    real: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "holo", tuple(self.holo))
        object.__setattr__(self, "real", tuple(self.real))
        names = self.holo + self.real
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not name.isidentifier() or name in _RESERVED:
                raise ValueError(f"invalid variable name {name!r}")

    @property
    def n_holo(self) -> int:
        return len(self.holo)

    @property
    def nvars(self) -> int:
        return 2 * len(self.holo) + len(self.real)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return self.holo + tuple(f"conj({z})" for z in self.holo) + self.real

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r} (declared: {', '.join(self.names)})") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def kind(self, i: int) -> str:
        n = len(self.holo)
        if i < n:
            return HOLOMORPHIC
        if i < 2 * n:
            return ANTIHOLOMORPHIC
        return REAL

    def partner(self, i: int) -> int:
        n = len(self.holo)
        if i < n:
            return i + n
        if i < 2 * n:
            return i - n
        return i

    def conj_name(self, name: str) -> str:
        return self.names[self.partner(self.index(name))]

    # key layout
    @cached_property
    def deg_shift(self) -> int:
        return _W * self.nvars

    @cached_property
    def _shifts(self) -> tuple[int, ...]:
        nv = self.nvars
        return tuple(_W * (nv - 1 - i) for i in range(nv))

    def encode(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ValueError(f"exponent vector {tuple(exps)} has wrong length for {self.names}")
        key = 0
        for e, sh in zip(exps, self._shifts):
            if e < 0 or e > _FIELD:
                raise ValueError(f"exponent {e} out of range")
            key |= e << sh
        return key | (sum(exps) << self.deg_shift)

    def decode(self, key: int) -> tuple[int, ...]:
        return tuple((key >> sh) & _FIELD for sh in self._shifts)

    def __str__(self):
        return "(" + ", ".join(self.names) + ")"


def _mul_dicts(a: dict, b: dict, cap: int, dshift: int) -> dict:
    # Products are accumulated on the raw (basis index, rational) components
    # and only turned back into scalars at the end; this loop is where almost
    # all of the time goes.
    if cap < 0 or not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    bl = sorted((k, v._p) for k, v in b.items())
    out: dict = {}
    for ka, ca in a.items():
        lim = (cap - (ka >> dshift) + 1) << dshift
        if lim <= 0:
            continue
        for j, x in ca._p:
            row = _MUL[j]
            for kb, pb in bl:
                if kb >= lim:
                    break
                k = ka + kb
                acc = out.get(k)
                if acc is None:
                    acc = out[k] = {}
                for l, y in pb:
                    m, c = row[l]
                    t = x * y if c == 1 else c * x * y
                    if m in acc:
                        acc[m] += t
                    else:
                        acc[m] = t
    res = {}
    for k, acc in out.items():
        p = tuple(sorted(kv for kv in acc.items() if kv[1]))
        if p:
            res[k] = ComplexScalar._raw(p)
    return res


def _add_into(out: dict, b: dict, scale=None) -> None:
    for k, v in b.items():
        if scale is not None:
            v = v * scale
        if k in out:
            s = out[k] + v
            if s:
                out[k] = s
            else:
                del out[k]
        elif v:
            out[k] = v


class Jet:
    """Truncated power series with exact coefficients.  Treat as immutable."""

    __slots__ = ("space", "order", "exact", "_c")
    __hash__ = None

    def __init__(self, space: VarSpace, terms: Mapping | None = None, order: int = 0, exact: bool = True):
        if order > MAX_ORDER:
            raise ValueError(f"order {order} exceeds supported maximum {MAX_ORDER}")
        self.space = space
        self.order = order
        c: dict = {}
        for exps, coeff in (terms or {}).items():
            key = space.encode(exps)
            coeff = as_scalar(coeff)
            if not coeff:
                continue
            if sum(exps) > order:
                exact = False
                continue
            c[key] = c[key] + coeff if key in c else coeff
        self._c = {k: v for k, v in c.items() if v}
        self.exact = exact

    @classmethod
    def _make(cls, space: VarSpace, c: dict, order: int, exact: bool) -> "Jet":
        obj = object.__new__(cls)
        obj.space = space
        obj.order = order
        obj.exact = exact
        obj._c = c
        return obj

    # constructors
    @classmethod
    def zero(cls, space: VarSpace, order: int) -> "Jet":
        return cls._make(space, {}, order, True)

    @classmethod
    def constant(cls, space: VarSpace, value, order: int) -> "Jet":
        value = as_scalar(value)
        return cls._make(space, {0: value} if value else {}, order, True)

    @classmethod
    def variable(cls, space: VarSpace, name: str, order: int) -> "Jet":
        i = space.index(name)
        exps = [0] * space.nvars
        exps[i] = 1
        if order < 1:
            return cls._make(space, {}, order, False)
        return cls._make(space, {space.encode(exps): ONE}, order, True)

    # inspection
    def terms(self) -> dict[tuple[int, ...], ComplexScalar]:
        """Exponent vector -> coefficient, in graded-lex order."""
        dec = self.space.decode
        return {dec(k): self._c[k] for k in self._sorted_keys()}

    def _sorted_keys(self) -> list[int]:
        dshift = self.space.deg_shift
        return sorted(self._c, key=lambda k: (k >> dshift, -k))

    def __len__(self):
        return len(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def coefficient(self, exps: Sequence[int]) -> ComplexScalar:
        return self._c.get(self.space.encode(exps), ZERO)

    def degree(self) -> int:
        dshift = self.space.deg_shift
        return max((k >> dshift for k in self._c), default=-1)

    def valuation(self) -> int:
        """Lowest total degree present; order + 1 for the zero jet."""
        dshift = self.space.deg_shift
        return min((k >> dshift for k in self._c), default=self.order + 1)

    def eval0(self) -> ComplexScalar:
        if self.order < 0:
            raise WorkingOrderExhausted(
                "jet has no valid coefficients left (order < 0); increase the working order"
            )
        return self._c.get(0, ZERO)

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.space == other.space and self.order == other.order and self._c == other._c
        try:
            value = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self._c == ({0: value} if value else {})

    def __repr__(self):
        tag = "" if self.exact else ", truncated"
        return f"Jet({str(self)!r}, order={self.order}{tag})"

    def __str__(self):
        if not self._c:
            return "0"
        names = self.space.names
        parts = []
        for key in self._sorted_keys():
            coeff = self._c[key]
            mono = []
            for name, e in zip(names, self.space.decode(key)):
                if e == 1:
                    mono.append(name)
                elif e > 1:
                    mono.append(f"{name}^{e}")
            neg = parts and str(coeff).startswith("-")
            if neg:
                coeff = -coeff
            if not mono:
                text = str(coeff)
            elif coeff == 1:
                text = "*".join(mono)
            else:
                # a bare leading "-x^2" would read as (-x)^2, so keep the explicit -1
                text = str(coeff) + "*" + "*".join(mono)
            parts.append((" - " if neg else " + ") + text if parts else text)
        return "".join(parts)

    # arithmetic
    def _check(self, other: "Jet"):
        if self.space != other.space:
            raise SpaceMismatchError(f"jets live over different spaces {self.space} and {other.space}")

    def _combined_order(self, other: "Jet") -> tuple[int, bool]:
        if self.exact and other.exact:
            return max(self.order, other.order), True
        if self.exact:
            return other.order, False
        if other.exact:
            return self.order, False
        return min(self.order, other.order), False

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            return other
        return Jet.constant(self.space, other, self.order)

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        order, exact = self._combined_order(other)
        out = dict(self._c)
        _add_into(out, other._c)
        return self._truncated(out, order, exact)

    __radd__ = __add__

    def __neg__(self):
        return Jet._make(self.space, {k: -v for k, v in self._c.items()}, self.order, self.exact)

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            try:
                s = as_scalar(other)
            except TypeError:
                return NotImplemented
            if not s:
                return Jet._make(self.space, {}, self.order, self.exact)
            return Jet._make(self.space, {k: v * s for k, v in self._c.items()}, self.order, self.exact)
        self._check(other)
        order, exact = self._combined_order(other)
        out = _mul_dicts(self._c, other._c, order, self.space.deg_shift)
        if exact and self._c and other._c and self.degree() + other.degree() > order:
            exact = False
        return Jet._make(self.space, out, order, exact)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.invert_unit()
        return self * as_scalar(other).inv()

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = Jet.constant(self.space, ONE, self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def _truncated(self, c: dict, order: int, exact: bool) -> "Jet":
        dshift = self.space.deg_shift
        lim = (order + 1) << dshift
        if any(k >= lim for k in c):
            c = {k: v for k, v in c.items() if k < lim}
            exact = False
        return Jet._make(self.space, c, order, exact)

    def truncate(self, order: int) -> "Jet":
        if order >= self.order and not self.exact:
            return self
        return self._truncated(dict(self._c), order, self.exact)

    def with_order(self, order: int) -> "Jet":
        """Same series at a different order; raising the order needs an exact jet."""
        if order > self.order and not self.exact:
            raise WorkingOrderExhausted(f"cannot raise order of a truncated jet from {self.order} to {order}")
        return self._truncated(dict(self._c), order, self.exact)

    # calculus
    def deriv(self, var: str | int) -> "Jet":
        i = var if isinstance(var, int) else self.space.index(var)
        sh = self.space._shifts[i]
        step = (1 << sh) + (1 << self.space.deg_shift)
        out = {}
        for k, v in self._c.items():
            e = (k >> sh) & _FIELD
            if e:
                out[k - step] = v * e
        order = self.order if self.exact else self.order - 1
        return Jet._make(self.space, out, order, self.exact)

    def conj_swap(self) -> "Jet":
        """Formal conjugation: swap z_j <-> conj(z_j) and conjugate coefficients."""
        sp = self.space
        n = sp.n_holo
        if n == 0:
            return Jet._make(sp, {k: v.conj() for k, v in self._c.items()}, self.order, self.exact)
        shifts = sp._shifts
        hmask = 0
        amask = 0
        for j in range(n):
            hmask |= _FIELD << shifts[j]
            amask |= _FIELD << shifts[j + n]
        delta = _W * n
        keep = ~(hmask | amask)
        out = {}
        for k, v in self._c.items():
            nk = (k & keep) | ((k & hmask) >> delta) | ((k & amask) << delta)
            out[nk] = v.conj()
        return Jet._make(sp, out, self.order, self.exact)

    def is_real(self) -> bool:
        return self.conj_swap()._c == self._c

    def set_zero(self, names: Iterable[str]) -> "Jet":
        """Substitute 0 for the named variables (a ring homomorphism)."""
        mask = 0
        for name in names:
            mask |= _FIELD << self.space._shifts[self.space.index(name)]
        if not mask:
            return self
        return Jet._make(self.space, {k: v for k, v in self._c.items() if not k & mask}, self.order, self.exact)

    def invert_unit(self) -> "Jet":
        """Multiplicative inverse by a truncated Neumann series."""
        c0 = self._c.get(0, ZERO)
        if not c0:
            raise SingularError("cannot invert a jet with zero constant term")
        inv0 = c0.inv()
        u = self * inv0 - 1
        if u.is_zero():
            return Jet._make(self.space, {0: inv0}, self.order, True)
        one = Jet.constant(self.space, ONE, self.order)
        r = one
        for _ in range(self.order):
            r = one - u * r
        return Jet._make(self.space, {k: v * inv0 for k, v in r._c.items()}, self.order, False)

    # substitution
    def compose(self, assignment: Mapping[str, "Jet"], space: VarSpace | None = None, order: int | None = None) -> "Jet":
        """Substitute jets for variables.

        Every variable that actually occurs must be assigned a jet with zero
        constant term; all assigned jets must share one space.  The result is
        correct through the smallest order that the inputs justify.
        """
        return compose_many([self], assignment, space, order)[0]

    def translate(self, shift: Mapping[str, object]) -> "Jet":
        """Exact Taylor translation f(x) -> f(x + shift) of a polynomial jet."""
        if not self.exact:
            raise ValueError("translation needs an exact polynomial jet")
        sp = self.space
        order = self.order
        lin = {}
        for i, name in enumerate(sp.names):
            x = Jet.variable(sp, name, order)
            c = as_scalar(shift.get(name, 0))
            lin[i] = x + c if c else x
        result: dict = {}
        cache: dict[tuple[int, int], Jet] = {}
        for key, coeff in self._c.items():
            term = Jet.constant(sp, coeff, order)
            for i, e in enumerate(sp.decode(key)):
                if e:
                    if (i, e) not in cache:
                        cache[(i, e)] = lin[i] ** e
                    term = term * cache[(i, e)]
            _add_into(result, term._c)
        return Jet._make(sp, result, order, True)

    def evaluate(self, point: Mapping[str, object]) -> ComplexScalar:
        """Value of a polynomial jet at a point (missing variables are 0)."""
        if not self.exact:
            raise ValueError("evaluation away from 0 needs an exact polynomial jet")
        vals = [as_scalar(point.get(name, 0)) for name in self.space.names]
        total = ZERO
        for key, coeff in self._c.items():
            t = coeff
            for v, e in zip(vals, self.space.decode(key)):
                if e:
                    t = t * v**e
            total = total + t
        return total

    def rename(self, space: VarSpace, mapping: Mapping[str, str] | None = None) -> "Jet":
        """Re-express over another space, sending each used variable to a same-named (or mapped) one."""
        mapping = mapping or {}
        src = self.space
        idx = [space.index(mapping.get(name, name)) for name in src.names]
        out = {}
        for key, v in self._c.items():
            exps = [0] * space.nvars
            for i, e in enumerate(src.decode(key)):
                if e:
                    exps[idx[i]] += e
            nk = space.encode(exps)
            out[nk] = out[nk] + v if nk in out else v
        return Jet._make(space, {k: v for k, v in out.items() if v}, self.order, self.exact)


def compose_many(outers: Sequence[Jet], assignment: Mapping[str, Jet], space: VarSpace | None = None,
                 order: int | None = None) -> list[Jet]:
    """``[f.compose(assignment, space, order) for f in outers]`` with the powers of the assigned jets shared."""
    if not outers:
        return []
    src = outers[0].space
    for f in outers:
        if f.space != src:
            raise SpaceMismatchError("outer jets live over different spaces")
    used = set()
    for f in outers:
        for k in f._c:
            for i, e in enumerate(src.decode(k)):
                if e:
                    used.add(i)
    subs: list[Jet | None] = [None] * src.nvars
    for name, jet in assignment.items():
        subs[src.index(name)] = jet
    tgt_spaces = {j.space for j in assignment.values()}
    if space is not None:
        tgt_spaces.add(space)
    if len(tgt_spaces) > 1:
        raise SpaceMismatchError("assigned jets live over different spaces")
    if not tgt_spaces:
        if used:
            raise UnknownVariableError(f"no assignment for variables {[src.names[i] for i in sorted(used)]}")
        tgt_spaces = {src}
    tgt = tgt_spaces.pop()
    for i in sorted(used):
        if subs[i] is None:
            raise UnknownVariableError(f"no assignment for variable {src.names[i]!r}")
        if subs[i]._c.get(0):
            raise ConstantTermError(f"assignment for {src.names[i]!r} has nonzero constant term; recenter first")
    nv = src.nvars
    dshift = tgt.deg_shift
    vals = [subs[i].valuation() if subs[i] is not None else 1 for i in range(nv)]
    powers: dict[tuple[int, int], list[dict]] = {}

    def power(i: int, e: int, cap: int) -> dict:
        lst = powers.setdefault((i, cap), [{0: ONE}])
        while len(lst) <= e:
            lst.append(_mul_dicts(lst[-1], subs[i]._c, cap, dshift))
        return lst[e]

    def rec(terms: list, i: int, cap: int, top: int) -> dict:
        while i < nv and all(t[0][i] == 0 for t in terms):
            i += 1
        if i == nv:
            total = ZERO
            for _, c in terms:
                total = total + c
            return {0: total} if total and cap >= 0 else {}
        out: dict = {}
        for e, grp in groupby(terms, key=lambda t: t[0][i]):
            grp = list(grp)
            if e == 0:
                _add_into(out, rec(grp, i + 1, cap, top))
                continue
            sub_cap = cap - e * vals[i]
            if sub_cap < 0:
                continue
            sub = rec(grp, i + 1, sub_cap, top)
            if sub:
                _add_into(out, _mul_dicts(power(i, e, top), sub, cap, dshift))
        return out

    results = []
    for f in outers:
        f_used = {i for k in f._c for i, e in enumerate(src.decode(k)) if e}
        f_order = order
        if f_order is None:
            inexact = [subs[i].order for i in f_used if not subs[i].exact]
            if not f.exact:
                inexact.append(f.order)
            f_order = min(inexact) if inexact else max([f.order] + [subs[i].order for i in f_used])
        exact = f.exact and all(subs[i].exact for i in f_used)
        terms = sorted((src.decode(k), v) for k, v in f._c.items())
        out = rec(terms, 0, f_order, f_order) if terms else {}
        result = Jet._make(tgt, out, f_order, exact)
        if exact and f._c:
            # exactness survives only if no product was cut off
            bound = max(sum(e * subs[i].degree() for i, e in enumerate(src.decode(k)) if e) for k in f._c)
            if bound > f_order:
                result.exact = False
        results.append(result)
    return results


class JetMatrix:
    """Rectangular matrix of jets over one space."""

    def __init__(self, rows: Sequence[Sequence[Jet]]):
        self.rows = [list(r) for r in rows]
        if not self.rows or not self.rows[0]:
            raise ValueError("empty jet matrix")
        ncols = len(self.rows[0])
        space = self.rows[0][0].space
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged jet matrix")
            for j in r:
                if j.space != space:
                    raise SpaceMismatchError("jet matrix entries over different spaces")
        self.space = space

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @classmethod
    def identity(cls, space: VarSpace, n: int, order: int) -> "JetMatrix":
        return cls([[Jet.constant(space, ONE if i == j else ZERO, order) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "JetMatrix") -> "JetMatrix":
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for i in range(m):
            row = []
            for j in range(n):
                acc = None
                for t in range(k):
                    a, b = self.rows[i][t], other.rows[t][j]
                    if a.is_zero() and a.exact or b.is_zero() and b.exact:
                        continue
                    p = a * b
                    acc = p if acc is None else acc + p
                if acc is None:
                    acc = Jet.zero(self.space, min(self.rows[i][0].order, other.rows[0][j].order))
                row.append(acc)
            out.append(row)
        return JetMatrix(out)

    def __sub__(self, other: "JetMatrix") -> "JetMatrix":
        return JetMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __add__(self, other: "JetMatrix") -> "JetMatrix":
        return JetMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c) -> "JetMatrix":
        return JetMatrix([[a * c for a in r] for r in self.rows])

    def transpose(self) -> "JetMatrix":
        return JetMatrix([list(col) for col in zip(*self.rows)])

    def eval0(self) -> list[list[ComplexScalar]]:
        return [[a.eval0() for a in r] for r in self.rows]

    def __eq__(self, other):
        return isinstance(other, JetMatrix) and self.rows == other.rows

    def __repr__(self):
        return "JetMatrix([" + ", ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self.rows) + "])"

    def invert_unit(self) -> "JetMatrix":
        """Inverse of a matrix whose constant part is invertible.

        The constant part is inverted exactly; writing A = A0 (I + N) with N
        vanishing at 0, the rest is the truncated Neumann series in N.
        """
        m, n = self.shape
        if m != n:
            raise ValueError("only square matrices can be inverted")
        a0inv = linalg.inverse(self.eval0())
        sp = self.space
        entries = [a for r in self.rows for a in r]
        inexact = [a.order for a in entries if not a.exact]
        order = min(inexact) if inexact else max(a.order for a in entries)
        c0 = JetMatrix([[Jet.constant(sp, x, order) for x in r] for r in a0inv])
        eye = JetMatrix.identity(sp, n, order)
        nil = c0 @ self - eye
        if not inexact and all(a.is_zero() for r in nil.rows for a in r):
            return c0
        r = eye
        for _ in range(order):
            r = eye - nil @ r
        out = r @ c0
        return JetMatrix([[Jet._make(sp, a.truncate(order)._c, order, False) for a in row] for row in out.rows])


def map_inverse(components: Sequence[Jet], names: Sequence[str], order: int | None = None) -> list[Jet]:
    """Formal inverse of a map fixing 0.

    ``components[i]`` is F_i as a jet in the holomorphic variables ``names``.
    The linear part is inverted exactly and the remainder solved degree by
    degree: G <- L^{-1} (y - Q(G)) where Q is the nonlinear part of F.
    """
    comps = list(components)
    nvar = len(names)
    if len(comps) != nvar:
        raise ValueError(f"map has {len(comps)} components but {nvar} variables")
    sp = comps[0].space
    if order is None:
        order = min(c.order for c in comps)
    for c in comps:
        if c.eval0():
            raise ConstantTermError("map does not fix the origin")
    unit = [sp.index(name) for name in names]
    lin = []
    for c in comps:
        row = []
        for i in unit:
            exps = [0] * sp.nvars
            exps[i] = 1
            row.append(c.coefficient(exps))
        lin.append(row)
    try:
        linv = linalg.inverse(lin)
    except SingularError:
        raise SingularError("map has singular linear part") from None
    ys = [Jet.variable(sp, name, order) for name in names]
    quad = []
    for c, row in zip(comps, lin):
        q = c.with_order(order) if c.exact else c.truncate(order)
        for y, a in zip(ys, row):
            if a:
                q = q - y * a
        quad.append(q)

    def apply_linv(vec: list[Jet]) -> list[Jet]:
        out = []
        for row in linv:
            acc = Jet.zero(sp, order)
            for a, v in zip(row, vec):
                if a:
                    acc = acc + v * a
            out.append(acc)
        return out

    g = apply_linv(ys)
    if all(q.is_zero() for q in quad):
        return g
    # the degree-m part of Q(G) only sees G through degree m - 1, so each
    # pass can stop one degree higher than the last
    for m in range(2, order + 1):
        assign = {name: gj.truncate(m - 1) for name, gj in zip(names, g)}
        qg = compose_many(quad, assign, sp, m)
        g = [Jet._make(sp, a._c, order, False) for a in apply_linv([y - v for y, v in zip(ys, qg)])]
    return [Jet._make(sp, j._c, order, False) for j in g]
