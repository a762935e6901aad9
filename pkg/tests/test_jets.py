import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import SPACE, jet_to_sympy, jets, symbols_for, truncate_sympy
from crnondeg.errors import ConstantTermError, SingularError, SpaceMismatchError, UnknownVariableError
from crnondeg.errors import WorkingOrderExhausted
from crnondeg.jets import Jet, JetMatrix, VarSpace, compose_many, map_inverse
from crnondeg.parsing import parse
from crnondeg.scalars import I, ONE, ZERO, Rational

Z = VarSpace(("z",))
ZS = VarSpace(("z",), ("s",))
S = VarSpace((), ("s",))


def P(text, space=ZS, order=4):
    return parse(text, space, order)


class TestVarSpace:
    def test_layout(self):
        sp_ = VarSpace(("z1", "z2"), ("s",))
        assert sp_.names == ("z1", "z2", "conj(z1)", "conj(z2)", "s")
        assert sp_.partner(0) == 2 and sp_.partner(2) == 0 and sp_.partner(4) == 4
        assert sp_.kind(1) == "holomorphic" or sp_.kind(1).startswith("holo")

    def test_duplicate_names(self):
        with pytest.raises(ValueError):
            VarSpace(("z", "z"))

    def test_reserved_names(self):
        with pytest.raises(ValueError):
            VarSpace(("i",))


class TestMultiplication:
    def test_simple_product(self):
        assert P("z") * P("conj(z)") == P("z*conj(z)")

    def test_truncated_geometric_series(self):
        assert P("1+z") * P("1-z+z^2-z^3+z^4") == P("1")

    def test_everything_truncated(self):
        assert (P("z^2*conj(z)^2") * P("z*conj(z)")).is_zero()

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            P("z") * Jet.variable(Z, "z", 4)

    @given(jets(), jets())
    def test_against_sympy(self, a, b):
        syms = symbols_for(SPACE)
        expected = truncate_sympy(jet_to_sympy(a) * jet_to_sympy(b), list(syms.values()), 4)
        assert sp.expand(jet_to_sympy(a * b) - expected) == 0


class TestDerivatives:
    def test_conj_derivative(self):
        assert P("z^2*conj(z)^2").deriv("conj(z)") == P("2*z^2*conj(z)")

    def test_real_derivative(self):
        assert P("s + i*z*conj(z)").deriv("s") == P("1")

    def test_second_conj_derivative(self):
        # the grammar binds a leading minus tighter than ^, hence the explicit -1
        assert P("-1*conj(z)^2").deriv("conj(z)").deriv("conj(z)") == P("-2")

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariableError):
            P("z").deriv("w")

    def test_order_bookkeeping(self):
        exact = P("z^3")
        assert exact.deriv("z").order == exact.order
        cut = P("z^3").truncate(3)
        assert cut.exact and cut.deriv("z").order == 3
        inexact = Jet._make(ZS, dict(P("z^3")._c), 3, False)
        assert inexact.deriv("z").order == 2


class TestComposition:
    def test_square_into_quadric_gives_quartic(self):
        zw = VarSpace(("zp",))
        outer = parse("zp*conj(zp)", zw, 4)
        got = outer.compose({"zp": P("z^2"), "conj(zp)": P("conj(z)^2")})
        assert got == P("z^2*conj(z)^2")

    def test_zero_substitution(self):
        zw = VarSpace(("zp",))
        assert parse("zp", zw, 4).compose({"zp": Jet.zero(ZS, 4)}).is_zero()

    def test_graph_substitution(self):
        w = VarSpace(("w",))
        got = parse("w", w, 4).compose({"w": P("s + i*z^2*conj(z)^2")})
        assert got == P("s + i*z^2*conj(z)^2")

    def test_constant_term_rejected(self):
        with pytest.raises(ConstantTermError):
            P("z").compose({"z": P("1 + z"), "conj(z)": P("conj(z)"), "s": P("s")})

    def test_missing_assignment(self):
        with pytest.raises(UnknownVariableError):
            P("z*s").compose({"z": P("z")})

    def test_mixed_target_spaces(self):
        with pytest.raises(SpaceMismatchError):
            P("z*s").compose({"z": P("z"), "s": Jet.variable(S, "s", 4)})

    @given(jets(max_terms=4))
    def test_against_sympy(self, outer):
        inner = {"z1": P("z + z*s", SPACE2, 4), "z2": P("i*z^2", SPACE2, 4),
                 "conj(z1)": P("conj(z) - i*s^2", SPACE2, 4), "conj(z2)": P("s", SPACE2, 4), "s": P("z*conj(z)", SPACE2, 4)}
        got = outer.compose(inner)
        o = symbols_for(SPACE)
        t = symbols_for(SPACE2)
        sub = {o[k]: jet_to_sympy(v, t) for k, v in inner.items()}
        expected = truncate_sympy(jet_to_sympy(outer, o).xreplace(sub), list(t.values()), 4)
        assert sp.expand(jet_to_sympy(got, t) - expected) == 0

    @given(jets(max_terms=4), jets(max_terms=4))
    def test_compose_many_matches_compose(self, a, b):
        inner = {"z1": P("z + s", SPACE2, 4), "z2": P("z*s", SPACE2, 4),
                 "conj(z1)": P("conj(z) + s", SPACE2, 4), "conj(z2)": P("conj(z)*s", SPACE2, 4), "s": P("s", SPACE2, 4)}
        assert compose_many([a, b], inner) == [a.compose(inner), b.compose(inner)]


SPACE2 = ZS


class TestInversion:
    def test_one(self):
        assert P("1").invert_unit() == P("1")

    def test_neumann(self):
        assert P("1+s", order=3).invert_unit() == P("1 - s + s^2 - s^3", order=3)

    def test_constant(self):
        assert P("2*i").invert_unit().eval0() == I * Rational(-1, 2)

    def test_zero_constant(self):
        with pytest.raises(SingularError):
            P("z").invert_unit()

    def test_matrix_identity(self):
        eye = JetMatrix.identity(ZS, 2, 4)
        assert eye.invert_unit() == eye

    def test_matrix_one_by_one(self):
        m = JetMatrix([[P("1 + i*s", order=2)]])
        inv = m.invert_unit()
        assert inv[0, 0] == P("1 - i*s - s^2", order=2)
        assert (m @ inv)[0, 0] == P("1", order=2)

    def test_matrix_singular(self):
        m = JetMatrix([[P("z"), P("1")], [P("0"), P("s")]])
        with pytest.raises(SingularError):
            m.invert_unit()

    @given(jets(order=3), jets(order=3), jets(order=3), jets(order=3))
    def test_matrix_multiply_back(self, a, b, c, d):
        one = Jet.constant(SPACE, ONE, 3)
        m = JetMatrix([[one + a * Jet.variable(SPACE, "s", 3), b.truncate(3) * Jet.variable(SPACE, "z1", 3)],
                       [c * Jet.variable(SPACE, "conj(z2)", 3), one * 2 + d * Jet.variable(SPACE, "z2", 3)]])
        prod = m @ m.invert_unit()
        eye = JetMatrix.identity(SPACE, 2, 3)
        assert all((prod[i, j] - eye[i, j]).is_zero() for i in range(2) for j in range(2))

    @given(jets(order=4))
    def test_unit_multiply_back(self, a):
        u = Jet.constant(SPACE, 3 - I, 4) + a * Jet.variable(SPACE, "z1", 4)
        assert (u * u.invert_unit() - Jet.constant(SPACE, ONE, 4)).is_zero()


class TestMapInverse:
    Zeta = VarSpace(("zeta1", "zeta2"))

    def test_identity(self):
        f = [Jet.variable(self.Zeta, "zeta1", 5), Jet.variable(self.Zeta, "zeta2", 5)]
        assert [g.terms() for g in map_inverse(f, self.Zeta.holo)] == [f[0].terms(), f[1].terms()]

    def test_skewing_change(self):
        f = [parse("zeta1 + zeta2 - zeta2^2", self.Zeta, 5), parse("zeta2", self.Zeta, 5)]
        g = map_inverse(f, self.Zeta.holo)
        assert g[0].terms() == parse("zeta1 - zeta2 + zeta2^2", self.Zeta, 5).terms()
        assert g[1].terms() == parse("zeta2", self.Zeta, 5).terms()

    def test_scaling(self):
        g = map_inverse([parse("2*z", Z, 3)], ("z",))
        assert g[0].terms() == parse("1/2*z", Z, 3).terms()

    def test_singular(self):
        with pytest.raises(SingularError):
            map_inverse([parse("z^2", Z, 3)], ("z",))


class TestMisc:
    def test_conj_swap_examples(self):
        assert P("z^2").conj_swap() == P("conj(z)^2")
        assert P("i*z*conj(z) + s").conj_swap() == P("-i*z*conj(z) + s")

    def test_eval0(self):
        assert P("-2*conj(z)").eval0() == ZERO
        assert P("-2 + z").eval0() == -2
        assert (P("1") / (I * 2)).eval0() == I * Rational(-1, 2)

    def test_eval0_needs_order(self):
        j = Jet._make(ZS, {}, -1, False)
        with pytest.raises(WorkingOrderExhausted):
            j.eval0()

    def test_translate(self):
        sphere = VarSpace(("Z1", "Z2"))
        rho = parse("Z1*conj(Z1) + Z2*conj(Z2) - 1", sphere, 2)
        moved = rho.translate({"Z1": 1, "conj(Z1)": 1})
        assert moved == parse("Z1 + conj(Z1) + Z1*conj(Z1) + Z2*conj(Z2)", sphere, 2)

    def test_print_order_is_graded(self):
        assert str(P("s^2 + z + 1")) == "1 + z + s^2"

ZETA = VarSpace(("zeta1", "zeta2"))


@given(st.lists(st.integers(-2, 2), min_size=7, max_size=7))
def test_map_inverse_both_compositions_are_identity(c):
    a, b = c[0], c[1:]
    text1 = f"zeta1 + {a}*zeta2 + {b[0]}*zeta1^2 + {b[1]}*zeta1*zeta2 + {b[2]}*zeta2^2"
    text2 = f"zeta2 + {b[3]}*zeta1^2 + {b[4]}*zeta1*zeta2 + {b[5]}*zeta2^3"
    f = [parse(text1, ZETA, 5), parse(text2, ZETA, 5)]
    g = map_inverse(f, ZETA.holo)
    fg = [fi.compose(dict(zip(ZETA.holo, g))) for fi in f]
    gf = [gi.compose(dict(zip(ZETA.holo, f))) for gi in g]
    for name, x, y in zip(ZETA.holo, fg, gf):
        v = Jet.variable(ZETA, name, 5)
        assert x.terms() == v.terms() and y.terms() == v.terms()


@given(jets(), jets(), jets())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == Jet.zero(SPACE, 4)


@given(jets(), jets(), st.sampled_from(SPACE.names))
def test_leibniz(a, b, v):
    # a*b may have lost terms above degree 4, so its derivative is only known through degree 3
    assert ((a * b).deriv(v) - (a.deriv(v) * b + a * b.deriv(v))).truncate(3).is_zero()


@given(jets(max_terms=4), jets(space=ZS, max_terms=3), jets(space=ZS, max_terms=3), st.sampled_from(ZS.names))
def test_chain_rule(outer, u, v, x):
    z, zb, s = (Jet.variable(ZS, n, 4) for n in ZS.names)
    # substitutions without constant terms
    assign = {"z1": z + u * z, "z2": v * s, "conj(z1)": zb + s * s, "conj(z2)": zb * v, "s": s + z * zb}
    lhs = outer.compose(assign).deriv(x)
    rhs = Jet.zero(ZS, 3)
    for name, inner in assign.items():
        rhs = rhs + outer.deriv(name).compose(assign) * inner.deriv(x)
    assert (lhs - rhs).truncate(3).is_zero()


@given(jets(), jets())
def test_conj_swap_is_involutive_ring_map(a, b):
    assert a.conj_swap().conj_swap() == a
    assert (a * b).conj_swap() == a.conj_swap() * b.conj_swap()
    assert (a * a.conj_swap()).is_real()


@given(jets(max_terms=4))
def test_conj_swap_commutes_with_consistent_composition(outer):
    u = P("z + i*z*s")
    assign = {"z1": u, "conj(z1)": u.conj_swap(), "z2": P("z^2"), "conj(z2)": P("conj(z)^2"), "s": P("s + z*conj(z)")}
    assert outer.compose(assign).conj_swap() == outer.conj_swap().compose(assign)


@given(jets(order=4))
def test_truncation_is_stable(a):
    """Working at K + 2 and truncating to K gives what K alone gives."""
    b = Jet(SPACE, a.terms(), 6)
    x = Jet.variable(SPACE, "z1", 6) + Jet.variable(SPACE, "s", 6)
    assert ((b * b + x) ** 2).truncate(4) == (a * a + x.truncate(4)) ** 2
