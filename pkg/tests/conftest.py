import os

import sympy as sp
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from crnondeg.jets import Jet, VarSpace
from crnondeg.scalars import ComplexScalar, Rational, SurdScalar

settings.register_profile(
    "default",
    max_examples=20,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SQRT_BASIS = (sp.Integer(1), sp.sqrt(2), sp.sqrt(3), sp.sqrt(6))


def surd_to_sympy(x: SurdScalar):
    return sum((sp.Rational(int(c.numerator), int(c.denominator)) * b for c, b in zip(x.coords(), SQRT_BASIS)),
               sp.Integer(0))


def to_sympy(x):
    if isinstance(x, SurdScalar):
        return surd_to_sympy(x)
    return surd_to_sympy(x.re) + sp.I * surd_to_sympy(x.im)


def same_number(a, b) -> bool:
    return sp.simplify(sp.expand(a - b)) == 0


def symbols_for(space: VarSpace) -> dict:
    return {name: sp.Symbol(name.replace("conj(", "bar_").replace(")", "")) for name in space.names}


def jet_to_sympy(j: Jet, syms: dict | None = None):
    syms = syms or symbols_for(j.space)
    out = sp.Integer(0)
    for exps, c in j.terms().items():
        mono = sp.Integer(1)
        for name, e in zip(j.space.names, exps):
            if e:
                mono *= syms[name] ** e
        out += to_sympy(c) * mono
    return sp.expand(out)


def truncate_sympy(expr, syms, order):
    poly = sp.Poly(sp.expand(expr), *syms)
    return sp.expand(sum((c * sp.prod([v ** e for v, e in zip(syms, m)]) for m, c in poly.terms() if sum(m) <= order),
                         sp.Integer(0)))


small_rationals = st.one_of(
    st.just(Rational(0)),
    st.builds(Rational, st.integers(-6, 6), st.integers(1, 4)),
)


@st.composite
def surds(draw):
    return SurdScalar.of(*(draw(small_rationals) for _ in range(4)))


@st.composite
def complexes(draw):
    return ComplexScalar.from_parts(draw(surds()), draw(surds()))


gaussian = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).map(
    lambda t: ComplexScalar.from_parts(SurdScalar.of(t[0], 0, 0, 0), SurdScalar.of(t[1], 0, 0, 0))
)

SPACE = VarSpace(("z1", "z2"), ("s",))


@st.composite
def jets(draw, space=SPACE, order=4, max_terms=6, coeffs=gaussian):
    n = space.nvars
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = tuple(draw(st.lists(st.integers(0, 2), min_size=n, max_size=n)))
        if sum(exps) <= order:
            terms[exps] = draw(coeffs)
    return Jet(space, terms, order)
