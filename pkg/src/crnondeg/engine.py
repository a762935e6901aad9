"""CR vector fields, the E_k ladder and nondegeneracy verdicts."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb
from typing import Sequence

from . import linalg
from .errors import SpaceMismatchError, TangencyError
from .jets import Jet, JetMatrix, VarSpace, compose_many, map_inverse
from .linalg import RowEchelon
from .manifolds import (
    CRMap,
    ExtrinsicManifold,
    GraphManifold,
    LinearChange,
    extrinsic_to_graph,
    pullback_components,
    target_assignment,
    verify_maps_into_target,
)
from .scalars import I, ONE, ZERO, ComplexScalar

DEFAULT_MAX_ORDER = 10


@dataclass
class CRVectorField:
    """sum_j a_j d/d(conj z_j) + sum_mu b_mu d/ds_mu over the CR space of a graph manifold."""

    space: VarSpace
    dzbar_coeffs: list[Jet]
    ds_coeffs: list[Jet]

    def apply(self, f: Jet) -> Jet:
        if f.space != self.space:
            raise SpaceMismatchError(f"field acts on {self.space}, got a jet over {f.space}")
        acc = None
        terms = [(f"conj({z})", a) for z, a in zip(self.space.holo, self.dzbar_coeffs)]
        terms += list(zip(self.space.real, self.ds_coeffs))
        for name, a in terms:
            if a.is_zero() and a.exact:
                continue
            df = f.deriv(name)
            if a.exact and len(a) == 1 and a.eval0() == ONE:
                part = df
            else:
                part = a * df
            acc = part if acc is None else acc + part
        if acc is None:
            return Jet.zero(self.space, f.order if f.exact else f.order - 1)
        return acc

    __call__ = apply

    def set_zero(self, names) -> "CRVectorField":
        return CRVectorField(
            self.space, [a.set_zero(names) for a in self.dzbar_coeffs], [b.set_zero(names) for b in self.ds_coeffs]
        )


def apply_field(field_: CRVectorField, f: Jet) -> Jet:
    return field_.apply(f)


def cr_basis(m: GraphManifold) -> list[CRVectorField]:
    """Lambda_j = d/d(conj z_j) + sum_mu b_{j mu} d/ds_mu with b = -i phi_zbar^T (I + i phi_s)^{-T}.

    Here (I + i phi_s)[nu][mu] = delta + i d(phi_nu)/d(s_mu) is the Jacobian of
    s + i phi in s; the transpose makes each field kill s_nu + i phi_nu, the
    restriction of w_nu.  For codimension one the transpose is invisible.
    """
    sp = m.cr_space
    n = m.n
    phi_zbar = JetMatrix([[p.deriv(f"conj({z})") for z in m.z_names] for p in m.phi]) if n else None
    jac = JetMatrix([[(Jet.constant(sp, ONE, p.order) if nu == mu else Jet.zero(sp, p.order)) + p.deriv(s) * I
                      for mu, s in enumerate(m.s_names)] for nu, p in enumerate(m.phi)])
    jinv_t = jac.invert_unit().transpose()
    fields = []
    if not n:
        return fields
    b = (phi_zbar.transpose() @ jinv_t).scale(-I)
    for j in range(n):
        a = [Jet.constant(sp, ONE if k == j else ZERO, m.order) for k in range(n)]
        fields.append(CRVectorField(sp, a, list(b.rows[j])))
    return fields


def gradient_pullback(target: ExtrinsicManifold, h: CRMap, source: GraphManifold,
                      holomorphic_slice: bool = False) -> JetMatrix:
    """Entry (l, nu): d(rho'_l)/dZ'_nu evaluated at (H, conj H) on M.

    With ``holomorphic_slice`` the source z-variables are set to 0 first.
    Nothing in a CR field differentiates in z, so the values at 0 of all
    iterated field derivatives are unchanged, while the jets shrink.
    """
    hs, hbar = pullback_components(h, source)
    if holomorphic_slice:
        hs = [c.set_zero(source.z_names) for c in hs]
        hbar = [c.set_zero(source.z_names) for c in hbar]
    assign = target_assignment(target, hs, hbar)
    grads = [r.deriv(name) for r in target.rho for name in target.space.holo]
    flat = compose_many(grads, assign, source.cr_space)
    n = target.N
    return JetMatrix([flat[l * n:(l + 1) * n] for l in range(target.d)])


def multiindices(n: int, k: int):
    """Multiindices of length n and weight k, lexicographically descending."""
    if n == 0:
        if k == 0:
            yield ()
        return
    for a in range(k, -1, -1):
        for rest in multiindices(n - 1, k - a):
            yield (a,) + rest


@dataclass(frozen=True)
class Generator:
    k: int
    alpha: tuple
    l: int
    row: tuple
    new: bool  # enlarged the span when it was added


@dataclass
class EkLadder:
    n_target: int
    dims: list[int] = field(default_factory=list)
    levels: list[list[Generator]] = field(default_factory=list)
    examined: list[int] = field(default_factory=list)

    @property
    def witnesses(self) -> list[Generator]:
        return [g for level in self.levels for g in level if g.new]

    def generators(self, k: int) -> list[tuple]:
        return [g.row for level in self.levels[: k + 1] for g in level]

    def basis(self, k: int) -> list[tuple]:
        ech = RowEchelon(self.n_target)
        for r in self.generators(k):
            ech.add(r)
        return ech.basis()


def ek_spaces(grad: JetMatrix, fields: Sequence[CRVectorField], max_order: int,
              stop_when_full: bool = True, holomorphic_slice: bool = True) -> EkLadder:
    """Rows Lambda^alpha grad_l at 0 for |alpha| <= max_order, accumulated by exact elimination.

    Lambda^alpha = Lambda_1^a1 ... Lambda_n^an, so Lambda_n acts first; the
    jet for alpha is obtained from the one for alpha - e_j, j the first
    nonzero slot.  Raises WorkingOrderExhausted if the jets run out of order.
    """
    d_t, n_t = grad.shape
    n = len(fields)
    if fields and fields[0].space != grad.space:
        raise SpaceMismatchError("gradient and CR fields live over different spaces")
    if holomorphic_slice:
        zs = grad.space.holo
        fields = [f.set_zero(zs) for f in fields]
        current = {(0,) * n: [[e.set_zero(zs) for e in row] for row in grad.rows]}
    else:
        current = {(0,) * n: [list(row) for row in grad.rows]}
    ladder = EkLadder(n_t)
    ech = RowEchelon(n_t)
    total = 0
    for k in range(max_order + 1):
        if k > 0:
            nxt = {}
            for alpha in multiindices(n, k):
                j = next(i for i, a in enumerate(alpha) if a)
                parent = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
                nxt[alpha] = [[fields[j].apply(e) for e in row] for row in current[parent]]
            current = nxt
        level = []
        for alpha in multiindices(n, k):
            total += 1
            for l, vec in enumerate(current[alpha]):
                row = tuple(e.eval0() for e in vec)
                level.append(Generator(k, alpha, l, row, ech.add(row)))
        ladder.levels.append(level)
        ladder.dims.append(ech.rank)
        ladder.examined.append(total)
        if stop_when_full and ech.rank == n_t:
            break
        if n == 0:
            # no CR directions: the ladder is constant from here on
            if k == max_order:
                break
    return ladder


@dataclass
class NondegeneracyReport:
    nondegenerate: bool
    k0: int | None
    max_order: int
    ladder: EkLadder
    working_order: int = 0

    @property
    def verdict(self) -> str:
        return f"nondegenerate({self.k0})" if self.nondegenerate else f"degenerate_up_to({self.max_order})"

    @property
    def dims(self) -> list[int]:
        return list(self.ladder.dims)

    def derivative_count(self, n: int) -> int:
        """#{beta : 1 <= |beta| <= k} for k = k0 (or the max order when degenerate)."""
        k = self.k0 if self.nondegenerate else self.max_order
        return comb(n + k, n) - 1


def nondegeneracy_order(ladder: EkLadder, max_order: int, working_order: int = 0) -> NondegeneracyReport:
    for k, dim in enumerate(ladder.dims):
        if dim == ladder.n_target:
            return NondegeneracyReport(True, k, max_order, ladder, working_order)
    return NondegeneracyReport(False, None, max_order, ladder, working_order)


def _input_degree(*jets: Jet) -> int:
    return max((j.degree() for j in jets if j.exact), default=0)


class Analysis:
    """One source/target/map problem, normalised and ready for the E_k computation.

    The target stays extrinsic (Definition data lives in target coordinates);
    an extrinsic source is converted to graph form and the map is pulled
    through the recorded linear change.
    """

    def __init__(self, source, target, h: CRMap, max_order: int = DEFAULT_MAX_ORDER,
                 working_order: int | None = None, check_tangency: bool = True):
        if isinstance(target, GraphManifold):
            target = target.to_extrinsic()
        target = target.recentered()
        h = h.recentered()
        inputs = list(target.rho) + list(h.components)
        if isinstance(source, ExtrinsicManifold):
            source = source.recentered()
            inputs += source.rho
        else:
            inputs += source.phi
        if working_order is None:
            working_order = max(max_order, _input_degree(*inputs)) + 1
        self.max_order = max_order
        self.working_order = working_order
        self.change: LinearChange | None = None
        if isinstance(source, ExtrinsicManifold):
            if source.space != h.space:
                raise SpaceMismatchError("map components must be written in the source variables")
            source, self.change = extrinsic_to_graph(source, working_order)
            h = CRMap([c.with_order(working_order) for c in h.components])
            h = self.change.apply_to_map(h)
        else:
            source = source.with_order(working_order)
            if h.space != source.ambient:
                raise SpaceMismatchError(
                    f"map components must be written in the source variables {source.ambient.holo}"
                )
        self.source = source
        self.target = target.with_order(working_order)
        self.h = CRMap([c.with_order(working_order) for c in h.components])
        if len(self.h.components) != self.target.N:
            raise SpaceMismatchError(
                f"map has {len(self.h.components)} components but the target lives in C^{self.target.N}"
            )
        self.tangency = verify_maps_into_target(self.h, self.source, self.target) if check_tangency else None
        if self.tangency is not None and not self.tangency.ok:
            raise TangencyError(self.tangency.message, self.tangency.residuals)
        self.fields = cr_basis(self.source)

    def gradient(self, holomorphic_slice: bool = True) -> JetMatrix:
        return gradient_pullback(self.target, self.h, self.source, holomorphic_slice)

    def ladder(self, max_order: int | None = None, stop_when_full: bool = True) -> EkLadder:
        k = self.max_order if max_order is None else max_order
        return ek_spaces(self.gradient(), self.fields, k, stop_when_full=stop_when_full)

    def run(self) -> NondegeneracyReport:
        return nondegeneracy_order(self.ladder(), self.max_order, self.working_order)

    def transformed(self, components: Sequence[Jet], check_tangency: bool = True) -> "Analysis":
        """Same problem after the target change of coordinates Z' -> F(Z')."""
        target, h = transform_target(self.target, components, self.h)
        new = object.__new__(Analysis)
        new.max_order = self.max_order
        new.working_order = self.working_order
        new.change = self.change
        new.source = self.source
        new.target = target
        new.h = h
        new.tangency = verify_maps_into_target(h, self.source, target) if check_tangency else None
        if new.tangency is not None and not new.tangency.ok:
            raise TangencyError(new.tangency.message, new.tangency.residuals)
        new.fields = self.fields
        return new


def analyze(source, target, h: CRMap, max_order: int = DEFAULT_MAX_ORDER,
            working_order: int | None = None) -> NondegeneracyReport:
    return Analysis(source, target, h, max_order, working_order).run()


def manifold_nondegeneracy(m, max_order: int = DEFAULT_MAX_ORDER, working_order: int | None = None) -> NondegeneracyReport:
    """Finite nondegeneracy of M itself: the identity map of M into M."""
    if isinstance(m, GraphManifold):
        target = m.to_extrinsic()
        h = CRMap.identity(m.ambient, m.order)
        return analyze(m, target, h, max_order, working_order)
    m = m.recentered()
    h = CRMap.identity(m.space, m.order)
    return analyze(m, m, h, max_order, working_order)


def transform_target(target: ExtrinsicManifold, components: Sequence[Jet], h: CRMap | None = None):
    """New defining functions rho' o F^{-1} and, if given, the new map F o H."""
    comps = [c.with_order(target.order) if c.exact else c for c in components]
    if len(comps) != target.N:
        raise ValueError(f"coordinate change has {len(comps)} components, target lives in C^{target.N}")
    for c in comps:
        if c.space != target.space:
            raise SpaceMismatchError("coordinate change must be written in the target variables")
    order = target.order
    g = map_inverse(comps, target.space.holo, order)
    assign = {}
    for name, gj in zip(target.space.holo, g):
        assign[name] = gj
        assign[f"conj({name})"] = gj.conj_swap()
    rho = compose_many(target.rho, assign, target.space, order)
    new_target = ExtrinsicManifold(target.space, rho)
    if h is None:
        return new_target
    src = h.space
    hmap = dict(zip(target.space.holo, h.components))
    new_h = CRMap([c.compose(hmap, space=src, order=order) for c in comps])
    return new_target, new_h


def linear_part(components: Sequence[Jet], names: Sequence[str]) -> list[list[ComplexScalar]]:
    sp = components[0].space
    out = []
    for c in components:
        row = []
        for name in names:
            exps = [0] * sp.nvars
            exps[sp.index(name)] = 1
            row.append(c.coefficient(exps))
        out.append(row)
    return out


@dataclass
class TransformationCheck:
    ok: bool
    per_order: list[tuple[int, int, int, bool]]  # (k, dim E_k, dim E~_k, row spaces equal)
    message: str = ""


def check_transformation_law(original: EkLadder, transformed: EkLadder,
                             jacobian_at_0: Sequence[Sequence]) -> TransformationCheck:
    """E~_k(0) == E_k(0) (dF(0))^{-1} as row spaces, for every computed k."""
    n_t = original.n_target
    minv = linalg.inverse(jacobian_at_0)
    per = []
    ok = len(original.dims) == len(transformed.dims)
    for k in range(min(len(original.dims), len(transformed.dims))):
        moved = [tuple(linalg.matmul([list(r)], minv)[0]) for r in original.generators(k)]
        equal = linalg.same_row_space(moved, transformed.generators(k), n_t)
        per.append((k, original.dims[k], transformed.dims[k], equal))
        ok = ok and equal
    msg = "ok" if ok else "row spaces differ" if len(original.dims) == len(transformed.dims) else "ladder lengths differ"
    return TransformationCheck(ok, per, msg)


def random_biholomorphism(space: VarSpace, rng: random.Random, order: int) -> list[Jet]:
    """Identity plus strictly upper triangular integer linear part, plus integer quadratic terms in {-2..2}."""
    names = space.holo
    n = len(names)
    xs = [Jet.variable(space, z, order) for z in names]
    comps = []
    for i in range(n):
        c = xs[i]
        for j in range(i + 1, n):
            a = rng.randint(-2, 2)
            if a:
                c = c + xs[j] * a
        for p, q in combinations_with_replacement(range(n), 2):
            a = rng.randint(-2, 2)
            if a:
                c = c + xs[p] * xs[q] * a
        comps.append(c)
    return comps


@dataclass
class InvarianceTrial:
    index: int
    components: list[str]
    check: TransformationCheck
    original_verdict: str
    transformed_verdict: str

    @property
    def ok(self) -> bool:
        return self.check.ok and self.original_verdict == self.transformed_verdict


def invariance_trials(analysis: Analysis, seed: int, trials: int, max_order: int | None = None,
                      check_tangency: bool = False) -> list[InvarianceTrial]:
    """Run the transformation-law check for ``trials`` random target changes drawn from ``seed``.

    The transformed map lands in the transformed target by construction, so
    its tangency is only re-verified on request.
    """
    k = analysis.max_order if max_order is None else max_order
    base = analysis.ladder(k)
    base_verdict = nondegeneracy_order(base, k).verdict
    rng = random.Random(seed)
    out = []
    sp = analysis.target.space
    for t in range(trials):
        f = random_biholomorphism(sp, rng, analysis.working_order)
        moved = analysis.transformed(f, check_tangency)
        ladder = moved.ladder(k)
        chk = check_transformation_law(base, ladder, linear_part(f, sp.holo))
        out.append(InvarianceTrial(t, [str(c) for c in f], chk, base_verdict, nondegeneracy_order(ladder, k).verdict))
    return out


@dataclass
class TangencyLadder:
    ok: bool
    checked: int
    failures: list[str]


def tangency_ladder(analysis: Analysis, max_len: int = 4) -> TangencyLadder:
    """Lambda^alpha rho'_l(H, conj H) on M must vanish identically, |alpha| <= max_len.

    Two routes are compared against zero: applying the fields to the
    composite directly, and the chain-rule expansion in which each field
    only hits conj H (because Lambda H = 0) and the conj-derivatives of rho'.
    The second route is where the CR property of H and of the fields is
    actually exercised.
    """
    order = min(analysis.working_order, max_len + 2)
    src = analysis.source.with_order(order)
    tgt = analysis.target.with_order(order)
    h = CRMap([c.truncate(order) for c in analysis.h.components])
    fields = cr_basis(src)
    hs, hbar = pullback_components(h, src)
    assign = target_assignment(tgt, hs, hbar)
    names = tgt.space.holo
    failures = []
    checked = 0
    n = len(fields)

    for j, fld in enumerate(fields):
        for nu, c in enumerate(hs):
            if not fld.apply(c).is_zero():
                failures.append(f"Lambda_{j + 1} H_{nu + 1} != 0")

    # Lambda^word conj(H_nu), word read right to left
    hbar_words: dict[tuple, list[Jet]] = {(): hbar}

    def hbar_word(word: tuple) -> list[Jet]:
        if word not in hbar_words:
            inner = hbar_word(word[1:])
            hbar_words[word] = [fields[word[0]].apply(c) for c in inner]
        return hbar_words[word]

    deriv_cache: dict[tuple, Jet] = {}

    def rho_conj_deriv(l: int, m: tuple) -> Jet:
        key = (l, m)
        if key not in deriv_cache:
            r = tgt.rho[l]
            for nu in m:
                r = r.deriv(f"conj({names[nu]})")
            deriv_cache[key] = r.compose(assign, space=src.cr_space, order=order)
        return deriv_cache[key]

    for l in range(tgt.d):
        composite = tgt.rho[l].compose(assign, space=src.cr_space, order=order)
        for k in range(max_len + 1):
            for alpha in multiindices(n, k):
                word = tuple(j for j in range(n) for _ in range(alpha[j]))
                direct = composite
                for j in reversed(word):
                    direct = fields[j].apply(direct)
                # chain-rule expansion: terms are (coefficient, conj-derivative multiset, factors)
                expansion = {((), ()): 1}
                for j in reversed(word):
                    nxt: dict = {}
                    for (m, factors), c in expansion.items():
                        for nu in range(len(names)):
                            key = (tuple(sorted(m + (nu,))), tuple(sorted(factors + ((nu, (j,)),))))
                            nxt[key] = nxt.get(key, 0) + c
                        for idx, (nu, w) in enumerate(factors):
                            rest = factors[:idx] + ((nu, (j,) + w),) + factors[idx + 1:]
                            key = (m, tuple(sorted(rest)))
                            nxt[key] = nxt.get(key, 0) + c
                    expansion = nxt
                via_chain = None
                for (m, factors), c in expansion.items():
                    term = rho_conj_deriv(l, m) * c
                    for nu, w in factors:
                        term = term * hbar_word(w)[nu]
                    via_chain = term if via_chain is None else via_chain + term
                checked += 1
                if not direct.is_zero():
                    failures.append(f"direct Lambda^{alpha} rho'_{l + 1} != 0")
                if not via_chain.is_zero():
                    failures.append(f"chain-rule Lambda^{alpha} rho'_{l + 1} != 0")
    return TangencyLadder(not failures, checked, failures)
