"""Manifolds, CR maps, recentering, graph conversion and restriction to M."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from . import linalg
from .errors import BasepointError, ConvergenceError, GenericityError, ManifoldError, SpaceMismatchError
from .jets import Jet, JetMatrix, VarSpace
from .scalars import I, ONE, ZERO, ComplexScalar, as_scalar

_HALF_OVER_I = as_scalar(1) / (2 * I)  # 1/(2i), so (w - conj(w))/(2i) = Im w


def _point_map(space: VarSpace, point: Sequence) -> dict:
    pt = {}
    for name, p in zip(space.holo, point):
        p = as_scalar(p)
        pt[name] = p
        pt[f"conj({name})"] = p.conj()
    return pt


def _zero_point(n: int) -> tuple:
    return tuple(ZERO for _ in range(n))


@dataclass
class ExtrinsicManifold:
    """{rho = 0} in C^N with d real defining functions and a base point on it."""

    space: VarSpace
    rho: list[Jet]
    basepoint: tuple = None
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.rho = list(self.rho)
        if self.space.real:
            raise ManifoldError("ambient space of an extrinsic manifold has no real variables")
        if self.basepoint is None:
            self.basepoint = _zero_point(self.N)
        self.basepoint = tuple(as_scalar(p) for p in self.basepoint)
        if len(self.basepoint) != self.N:
            raise BasepointError(f"base point has {len(self.basepoint)} coordinates, ambient dimension is {self.N}")
        for r in self.rho:
            if r.space != self.space:
                raise SpaceMismatchError("defining function over the wrong space")
        if self.validate:
            self.check()

    @property
    def N(self) -> int:
        return self.space.n_holo

    @property
    def d(self) -> int:
        return len(self.rho)

    @property
    def order(self) -> int:
        return min(r.order for r in self.rho)

    def check(self):
        if not 1 <= self.d <= self.N:
            raise ManifoldError(f"codimension {self.d} out of range for C^{self.N}")
        for l, r in enumerate(self.rho):
            if not r.is_real():
                raise ManifoldError(f"defining function {l + 1} is not real: {r}")
        pt = _point_map(self.space, self.basepoint)
        for l, r in enumerate(self.rho):
            if r.exact:
                value = r.evaluate(pt)
            elif all(not p for p in self.basepoint):
                value = r.eval0()
            else:
                raise ManifoldError("truncated defining functions must be centered at 0")
            if value:
                raise BasepointError(f"base point is not on the manifold: rho_{l + 1}(p) = {value}")
        g = self.gradient_at_basepoint()
        if linalg.rank(g, self.N) != self.d:
            raise GenericityError(
                f"manifold is not generic at the base point: complex gradient has rank "
                f"{linalg.rank(g, self.N)} < codimension {self.d}"
            )

    def gradient_at_basepoint(self) -> list[list[ComplexScalar]]:
        pt = _point_map(self.space, self.basepoint)
        centered = all(not p for p in self.basepoint)
        rows = []
        for r in self.rho:
            row = []
            for z in self.space.holo:
                dr = r.deriv(z)
                row.append(dr.eval0() if centered else dr.evaluate(pt))
            rows.append(row)
        return rows

    def recentered(self) -> "ExtrinsicManifold":
        if all(not p for p in self.basepoint):
            return self
        shift = _point_map(self.space, self.basepoint)
        return ExtrinsicManifold(self.space, [r.translate(shift) for r in self.rho], None)

    def with_order(self, order: int) -> "ExtrinsicManifold":
        return ExtrinsicManifold(self.space, [r.with_order(order) for r in self.rho], self.basepoint, validate=False)


@dataclass
class GraphManifold:
    """Im w = phi(z, conj z, Re w) near 0, with phi real, phi(0) = 0, dphi(0) = 0.

    ``phi`` lives over the CR space (z, conj z, s) where s = Re w.
    """

    z_names: tuple
    w_names: tuple
    s_names: tuple
    phi: list[Jet]
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.z_names = tuple(self.z_names)
        self.w_names = tuple(self.w_names)
        self.s_names = tuple(self.s_names)
        self.phi = list(self.phi)
        if len(self.w_names) != len(self.s_names) or len(self.phi) != len(self.w_names):
            raise ManifoldError("graph form needs one w, one Re w name and one phi per codimension")
        if not self.phi:
            raise ManifoldError("codimension must be at least 1")
        for p in self.phi:
            if p.space != self.cr_space:
                raise SpaceMismatchError(f"phi must live over {self.cr_space}, got {p.space}")
        if self.validate:
            self.check()

    @property
    def n(self) -> int:
        return len(self.z_names)

    @property
    def d(self) -> int:
        return len(self.w_names)

    @property
    def order(self) -> int:
        return min(p.order for p in self.phi)

    @property
    def cr_space(self) -> VarSpace:
        return VarSpace(self.z_names, self.s_names)

    @property
    def ambient(self) -> VarSpace:
        return VarSpace(self.z_names + self.w_names)

    def check(self):
        for mu, p in enumerate(self.phi):
            if not p.is_real():
                raise ManifoldError(f"phi_{mu + 1} is not real: {p}")
            if p.valuation() < 2 and not p.is_zero():
                raise ManifoldError(f"phi_{mu + 1} must vanish to second order at 0 (phi(0) = 0, dphi(0) = 0)")

    def with_order(self, order: int) -> "GraphManifold":
        return GraphManifold(self.z_names, self.w_names, self.s_names, [p.with_order(order) for p in self.phi])

    def to_extrinsic(self) -> ExtrinsicManifold:
        """rho_mu = (w_mu - conj w_mu)/(2i) - phi_mu(z, conj z, (w + conj w)/2)."""
        amb = self.ambient
        order = self.order
        assign = {}
        for z in self.z_names:
            assign[z] = Jet.variable(amb, z, order)
            assign[f"conj({z})"] = Jet.variable(amb, f"conj({z})", order)
        for w, s in zip(self.w_names, self.s_names):
            assign[s] = (Jet.variable(amb, w, order) + Jet.variable(amb, f"conj({w})", order)) / 2
        rho = []
        for w, p in zip(self.w_names, self.phi):
            im_w = (Jet.variable(amb, w, order) - Jet.variable(amb, f"conj({w})", order)) * _HALF_OVER_I
            rho.append(im_w - p.compose(assign, space=amb, order=order))
        return ExtrinsicManifold(amb, rho)

    def embedding(self) -> dict[str, Jet]:
        """Ambient coordinates restricted to M: z -> z, w -> s + i phi."""
        cr = self.cr_space
        order = self.order
        out = {}
        for z in self.z_names:
            out[z] = Jet.variable(cr, z, order)
            out[f"conj({z})"] = Jet.variable(cr, f"conj({z})", order)
        for w, s, p in zip(self.w_names, self.s_names, self.phi):
            sj = Jet.variable(cr, s, order)
            out[w] = sj + p * I
            out[f"conj({w})"] = sj - p * I
        return out

    def restrict(self, ambient_jet: Jet) -> Jet:
        """Pull an ambient function back to M, as a jet in (z, conj z, s)."""
        if ambient_jet.space != self.ambient:
            raise SpaceMismatchError(f"expected a jet over {self.ambient}, got one over {ambient_jet.space}")
        return ambient_jet.compose(self.embedding(), space=self.cr_space)


def restrict_to_M(ambient_jet: Jet, m: GraphManifold) -> Jet:
    return m.restrict(ambient_jet)


@dataclass
class CRMap:
    """Holomorphic polynomial map given by its components over the source ambient space."""

    components: list[Jet]
    source_basepoint: tuple = None
    target_basepoint: tuple = None

    def __post_init__(self):
        self.components = list(self.components)
        if not self.components:
            raise ManifoldError("map has no components")
        sp = self.space
        n = sp.n_holo
        for c in self.components:
            if c.space != sp:
                raise SpaceMismatchError("map components over different spaces")
            for exps in c.terms():
                if any(exps[n:]):
                    raise ManifoldError(f"map components must be holomorphic (no conj or real variables): {c}")
        if self.source_basepoint is None:
            self.source_basepoint = _zero_point(n)
        if self.target_basepoint is None:
            self.target_basepoint = _zero_point(len(self.components))
        self.source_basepoint = tuple(as_scalar(p) for p in self.source_basepoint)
        self.target_basepoint = tuple(as_scalar(p) for p in self.target_basepoint)
        if len(self.source_basepoint) != n:
            raise BasepointError("source base point arity does not match the source variables")
        if len(self.target_basepoint) != len(self.components):
            raise BasepointError("target base point arity does not match the number of components")

    @property
    def space(self) -> VarSpace:
        return self.components[0].space

    @classmethod
    def identity(cls, space: VarSpace, order: int) -> "CRMap":
        return cls([Jet.variable(space, z, order) for z in space.holo])

    def recentered(self) -> "CRMap":
        p, q = self.source_basepoint, self.target_basepoint
        if all(not x for x in p) and all(not x for x in q):
            return self
        pt = _point_map(self.space, p)
        out = []
        for nu, (c, target) in enumerate(zip(self.components, q)):
            if c.exact:
                value = c.evaluate(pt)
            else:
                raise BasepointError("recentering a truncated map component is not supported")
            if value != target:
                raise BasepointError(f"H(p) != p': component {nu + 1} takes the value {value}, expected {target}")
            out.append(c.translate(pt) - target)
        return CRMap(out)


def recenter(obj, p=None, p_prime=None):
    """Move base points to 0.  Optional p / p_prime override the recorded base points."""
    if isinstance(obj, ExtrinsicManifold):
        if p is not None:
            obj = ExtrinsicManifold(obj.space, obj.rho, p)
        return obj.recentered()
    if isinstance(obj, CRMap):
        if p is not None or p_prime is not None:
            obj = CRMap(obj.components, p if p is not None else obj.source_basepoint,
                        p_prime if p_prime is not None else obj.target_basepoint)
        return obj.recentered()
    raise TypeError(f"cannot recenter {type(obj).__name__}")


@dataclass
class LinearChange:
    """Old coordinates as linear forms in the new ones: Z_old = A Z_new."""

    old: VarSpace
    new: VarSpace
    matrix: list[list[ComplexScalar]]

    def is_identity(self) -> bool:
        return self.old == self.new and self.matrix == linalg.identity(self.old.n_holo)

    def substitution(self, order: int) -> dict[str, Jet]:
        out = {}
        new_vars = [Jet.variable(self.new, z, order) for z in self.new.holo]
        for name, row in zip(self.old.holo, self.matrix):
            acc = Jet.zero(self.new, order)
            for a, v in zip(row, new_vars):
                if a:
                    acc = acc + v * a
            out[name] = acc
            out[f"conj({name})"] = acc.conj_swap()
        return out

    def pull(self, jet: Jet) -> Jet:
        """Express a function of the old coordinates in the new ones."""
        return jet.compose(self.substitution(jet.order), space=self.new, order=jet.order)

    def apply_to_map(self, h: CRMap) -> CRMap:
        return CRMap([self.pull(c) for c in h.components])


def _s_names(w_names: Sequence[str], taken: set) -> tuple:
    if len(w_names) == 1 and "s" not in taken:
        return ("s",)
    return tuple(f"re_{w}" for w in w_names)


def extrinsic_to_graph(m: ExtrinsicManifold, order: int | None = None) -> tuple[GraphManifold, LinearChange]:
    """Solve rho(z, s + it) = 0 for t = phi(z, conj z, s).

    Pivoted elimination on the complex gradient at 0 picks d coordinates to
    become w; setting w = 2i * (gradient . Z) makes the linear part of rho
    exactly Im w.  Newton's method in t then produces phi, doubling the
    number of correct degrees per step.
    """
    if any(m.basepoint):
        raise BasepointError("recenter the manifold before converting to graph form")
    if order is None:
        order = m.order
    m = m.with_order(order) if any(r.order != order for r in m.rho) else m
    old = m.space
    grad = m.gradient_at_basepoint()
    pivots = linalg.pivot_columns(grad)
    if len(pivots) != m.d:
        raise GenericityError("manifold is not generic at 0")
    rest = [j for j in range(m.N) if j not in pivots]
    z_names = tuple(old.holo[j] for j in rest)
    w_names = tuple(old.holo[j] for j in pivots)
    new = VarSpace(z_names + w_names)
    b = []
    for j in rest:
        b.append([ONE if k == j else ZERO for k in range(m.N)])
    for row in grad:
        b.append([x * 2 * I for x in row])
    change = LinearChange(old, new, linalg.inverse(b))
    rho_new = [change.pull(r) for r in m.rho]

    taken = set(old.holo)
    s_names = _s_names(w_names, taken)
    t_names = tuple(f"im_{w}" for w in w_names)
    work = VarSpace(z_names, s_names + t_names)
    to_work = {}
    for z in z_names:
        to_work[z] = Jet.variable(work, z, order)
        to_work[f"conj({z})"] = Jet.variable(work, f"conj({z})", order)
    for w, s, t in zip(w_names, s_names, t_names):
        sj, tj = Jet.variable(work, s, order), Jet.variable(work, t, order)
        to_work[w] = sj + tj * I
        to_work[f"conj({w})"] = sj - tj * I
    big_r = [r.compose(to_work, space=work, order=order) for r in rho_new]
    jac = [[r.deriv(t) for t in t_names] for r in big_r]

    cr = VarSpace(z_names, s_names)
    base = {}
    for z in z_names:
        base[z] = Jet.variable(cr, z, order)
        base[f"conj({z})"] = Jet.variable(cr, f"conj({z})", order)
    for s in s_names:
        base[s] = Jet.variable(cr, s, order)

    def at(jet: Jet, t_jets: list[Jet]) -> Jet:
        assign = dict(base)
        assign.update(zip(t_names, t_jets))
        return jet.compose(assign, space=cr, order=order)

    t_jets = [Jet._make(cr, {}, order, False) for _ in t_names]
    for _ in range(int(math.log2(order + 1)) + 3):
        residual = [at(r, t_jets) for r in big_r]
        if all(r.is_zero() for r in residual):
            break
        jinv = JetMatrix([[at(e, t_jets) for e in row] for row in jac]).invert_unit()
        step = jinv @ JetMatrix([[r] for r in residual])
        t_jets = [t - step[mu, 0] for mu, t in enumerate(t_jets)]
    else:
        residual = [at(r, t_jets) for r in big_r]
        if not all(r.is_zero() for r in residual):
            raise ConvergenceError("Newton iteration for the graph function did not converge")
    phi = [Jet._make(cr, t._c, order, False) for t in t_jets]
    return GraphManifold(z_names, w_names, s_names, phi), change


@dataclass
class TangencyCertificate:
    ok: bool
    residuals: list[Jet]
    message: str = ""


def pullback_components(h: CRMap, source: GraphManifold) -> tuple[list[Jet], list[Jet]]:
    """H and conj(H) restricted to M."""
    hs = [source.restrict(c) for c in h.components]
    return hs, [c.conj_swap() for c in hs]


def target_assignment(target: ExtrinsicManifold, hs: list[Jet], hbar: list[Jet]) -> dict[str, Jet]:
    if len(hs) != target.N:
        raise SpaceMismatchError(f"map has {len(hs)} components but the target lives in C^{target.N}")
    assign = {}
    for name, a, b in zip(target.space.holo, hs, hbar):
        assign[name] = a
        assign[f"conj({name})"] = b
    return assign


def verify_maps_into_target(h: CRMap, source: GraphManifold, target: ExtrinsicManifold) -> TangencyCertificate:
    """Check rho'(H, conj H) vanishes identically on M, up to the working order."""
    hs, hbar = pullback_components(h, source)
    assign = target_assignment(target, hs, hbar)
    residuals = [r.compose(assign, space=source.cr_space) for r in target.rho]
    for l, res in enumerate(residuals):
        if not res.is_zero():
            exps, coeff = next(iter(res.terms().items()))
            mono = "*".join(
                f"{name}^{e}" if e > 1 else name for name, e in zip(res.space.names, exps) if e
            ) or "1"
            msg = (
                f"map does not send the source into the target: rho'_{l + 1}(H, conj H) on M has "
                f"the term {coeff}*{mono}"
            )
            return TangencyCertificate(False, residuals, msg)
    return TangencyCertificate(True, residuals, "ok")
