"""Maurer-Cartan elements, twistings and (homotopy) gauge equivalence.

A degree-1 element x of a dg algebra is Maurer-Cartan when d(x) + x^2 = 0.
Twisting by an MC element deforms differentials:

* module twisting  A^[x]:   d(a) + x a          (right A-module),
* algebra twisting A^x:     d(a) + [x, a]       (dg algebra),
* hom twisting     A^[x,y]: d(a) + y a - (-1)^{|a|} a x,

and A^[x,y] is the complex of right-module maps A^[x] -> A^[y], an element
acting by left multiplication.  Invertible degree-0 elements act by gauge
transformations g . x = g x g^{-1} - d(g) g^{-1}; the weaker notion of
homotopy gauge equivalence asks for degree-0 elements g, h with

  (1) dg + yg - gx = 0,           (2) dh + xh - hy = 0,
  (3) hg - 1 = d^x(wx),           (4) gh - 1 = d^y(wy),

for some degree -1 witnesses wx, wy.  :func:`verify_homotopy_gauge` checks
exactly these four conditions; :func:`search_homotopy_gauge` is a
certificate-producing decision layer that never claims equivalence without
a verified certificate and never claims distinction without a computed
invariant that differs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .dgcore import (
    DgAlgebra,
    DgModule,
    Element,
    GradedModule,
    endomorphism_dga,
    ground_dga,
    vec_add,
    vec_scale,
    vec_sub,
)
from .exactlinalg import (
    CohomologyReport,
    ExactMatrix,
    Ring,
    cohomology,
    kernel_basis,
    rank,
    solve_linear,
)


class MCError(ValueError):
    pass


def mc_residual(a: DgAlgebra, x: Element) -> Element:
    return x.d() + x * x


def is_mc(a: DgAlgebra, x) -> tuple:
    """(is MC, residual d(x) + x^2).  Rejects inhomogeneous input."""
    x = a.as_element(x)
    if not x.is_homogeneous(1):
        raise MCError("an MC candidate must be homogeneous of degree 1")
    r = mc_residual(a, x)
    return r.is_zero(), r


@dataclass
class MCElement:
    """A verified degree-1 solution of d(x) + x^2 = 0."""

    algebra: DgAlgebra
    value: Element

    def __init__(self, algebra: DgAlgebra, value, unchecked: bool = False):
        self.algebra = algebra
        self.value = algebra.as_element(value)
        if not unchecked:
            ok, res = is_mc(algebra, self.value)
            if not ok:
                raise MCError("not Maurer-Cartan; residual %r" % (res,))

    def __eq__(self, other):
        return isinstance(other, MCElement) and self.algebra is other.algebra \
            and self.value == other.value


def zero_mc(a: DgAlgebra) -> MCElement:
    return MCElement(a, a.zero())


# ---------------------------------------------------------------------------
# twistings
# ---------------------------------------------------------------------------


def twist_module(a: DgAlgebra, x: MCElement, name: str = "") -> DgModule:
    """A^[x]: A as a right module with differential d + (left mult by x)."""
    _require_mc(a, x)
    ring = a.ring
    diff = {}
    for l in a.gm.labels:
        out = vec_add(ring, a.diff.get(l, {}), a.mul_dicts(x.value.coeffs, {l: ring.one()}))
        if out:
            diff[l] = out
    m = DgModule(a.gm, a, dict(a.mult), diff, name=name or "A^[x]")
    for l in a.gm.labels:
        if m.d_dict(m.diff.get(l, {})):
            raise MCError("twisted module differential does not square to zero")
    return m


def twist_algebra(a: DgAlgebra, x: MCElement, name: str = "") -> DgAlgebra:
    """A^x: the same graded algebra with differential d + [x, -]."""
    _require_mc(a, x)
    ring = a.ring
    diff = {}
    for l in a.gm.labels:
        e = {l: ring.one()}
        bracket = vec_sub(ring,
                          a.mul_dicts(x.value.coeffs, e),
                          vec_scale(ring, ring.coerce((-1) ** a.gm.degree[l]),
                                    a.mul_dicts(e, x.value.coeffs)))
        out = vec_add(ring, a.diff.get(l, {}), bracket)
        if out:
            diff[l] = out
    out_alg = DgAlgebra(a.gm, dict(a.unit), dict(a.mult), diff,
                        filtration=a.filtration, name=name or "%s^x" % a.name)
    for l in a.gm.labels:
        if out_alg.d_dict(out_alg.diff.get(l, {})):
            raise MCError("twisted algebra differential does not square to zero")
    return out_alg


def hom_twist(a: DgAlgebra, x: MCElement, y: MCElement, name: str = "") -> DgModule:
    """A^[x,y]: Hom(A^[x], A^[y]) with d(a) + y a - (-1)^{|a|} a x.

    Returned as a complex (a dg module over the ground ring); the
    composition pairing is ordinary multiplication in A, see
    :func:`hom_twist_compose`.
    """
    _require_mc(a, x)
    _require_mc(a, y)
    ring = a.ring
    ground = ground_dga(ring)
    diff = {}
    for l in a.gm.labels:
        e = {l: ring.one()}
        out = vec_add(ring, a.diff.get(l, {}), a.mul_dicts(y.value.coeffs, e))
        out = vec_sub(ring, out,
                      vec_scale(ring, ring.coerce((-1) ** a.gm.degree[l]),
                                a.mul_dicts(e, x.value.coeffs)))
        if out:
            diff[l] = out
    action = {(l, "1"): {l: ring.one()} for l in a.gm.labels}
    m = DgModule(a.gm, ground, action, diff, name=name or "A^[x,y]")
    for l in a.gm.labels:
        if m.d_dict(m.diff.get(l, {})):
            raise MCError("hom twist differential does not square to zero")
    return m


def hom_twist_compose(a: DgAlgebra, g, f):
    """The pairing A^[y,z] (x) A^[x,y] -> A^[x,z]: multiplication in A."""
    return a.as_element(g) * a.as_element(f)


def _require_mc(a: DgAlgebra, x: MCElement):
    if not isinstance(x, MCElement):
        raise MCError("expected an MCElement")
    ok, res = is_mc(a, x.value)
    if not ok:
        raise MCError("element is not MC; residual %r" % (res,))


# ---------------------------------------------------------------------------
# gauge action
# ---------------------------------------------------------------------------


def algebra_inverse(a: DgAlgebra, g) -> Element | None:
    """Two-sided inverse of a degree-0 element, by exact linear solve."""
    g = a.as_element(g)
    if not g.is_homogeneous(0):
        return None
    ring = a.ring
    deg0 = list(a.gm.labels_of_degree(0))
    index = {l: i for i, l in enumerate(deg0)}
    # solve g * h = 1 with h supported in degree 0
    mat = ExactMatrix.zeros(ring, len(deg0), len(deg0))
    for j, l in enumerate(deg0):
        prod = a.mul_dicts(g.coeffs, {l: ring.one()})
        for r, c in prod.items():
            if r not in index:
                return None
            mat.set_entry(index[r], j, c)
    target = [a.unit.get(l, ring.zero()) for l in deg0]
    sol = solve_linear(mat, target)
    if sol is None:
        return None
    h = Element(a, {deg0[i]: c for i, c in enumerate(sol[0]) if c != 0})
    if (g * h) != a.one() or (h * g) != a.one():
        return None
    return h


def gauge_act(a: DgAlgebra, g, x: MCElement) -> MCElement:
    """g . x = g x g^{-1} - d(g) g^{-1}; the result is again MC."""
    g = a.as_element(g)
    ginv = algebra_inverse(a, g)
    if ginv is None:
        raise MCError("gauge element is not invertible")
    out = g * x.value * ginv - g.d() * ginv
    return MCElement(a, out)


def is_gauge_pair(a: DgAlgebra, g, x: MCElement, y: MCElement) -> bool:
    """True iff dg + yg - gx = 0 exactly and g is invertible."""
    g = a.as_element(g)
    if algebra_inverse(a, g) is None:
        return False
    return (g.d() + y.value * g - g * x.value).is_zero()


# ---------------------------------------------------------------------------
# homotopy gauge certificates
# ---------------------------------------------------------------------------


@dataclass
class HomotopyGaugeCertificate:
    """Witnesses (g, h, wx, wy) for the four conditions of homotopy gauge
    equivalence; wx cobounds hg - 1 in A^x and wy cobounds gh - 1 in A^y."""

    g: Element
    h: Element
    wx: Element
    wy: Element

    def map(self, fn):
        return HomotopyGaugeCertificate(fn(self.g), fn(self.h), fn(self.wx), fn(self.wy))


def trivial_certificate(a: DgAlgebra) -> HomotopyGaugeCertificate:
    return HomotopyGaugeCertificate(a.one(), a.one(), a.zero(), a.zero())


def coboundary_in_twist(a: DgAlgebra, x: MCElement, w) -> Element:
    """d^x(w) = d(w) + [x, w] for the algebra twisting by x."""
    w = a.as_element(w)
    out = w.d() + x.value * w
    for deg in set(a.gm.degree[l] for l in w.coeffs):
        comp = w.component(deg)
        out = out - ((-1) ** deg) * (comp * x.value)
    return out


def verify_homotopy_gauge(a: DgAlgebra, x: MCElement, y: MCElement,
                          cert: HomotopyGaugeCertificate):
    """(ok, failed condition names) for the four conditions, checked exactly."""
    g, h, wx, wy = (a.as_element(cert.g), a.as_element(cert.h),
                    a.as_element(cert.wx), a.as_element(cert.wy))
    failures = []
    if not (g.d() + y.value * g - g * x.value).is_zero():
        failures.append("(1) dg + yg - gx = 0")
    if not (h.d() + x.value * h - h * y.value).is_zero():
        failures.append("(2) dh + xh - hy = 0")
    if not (h * g - a.one() - coboundary_in_twist(a, x, wx)).is_zero():
        failures.append("(3) hg - 1 = d^x(wx)")
    if not (g * h - a.one() - coboundary_in_twist(a, y, wy)).is_zero():
        failures.append("(4) gh - 1 = d^y(wy)")
    return not failures, failures


# ---------------------------------------------------------------------------
# twisted modules V (x) A from MC elements of End(V) (x) A
# ---------------------------------------------------------------------------


class TwistedModule:
    """(V (x) A, 1 (x) d + x) for an MC element x of End(V) (x) A."""

    def __init__(self, v: GradedModule, algebra: DgAlgebra, mc: MCElement,
                 end_dga: DgAlgebra = None, name: str = ""):
        self.v = v
        self.algebra = algebra
        self.end = end_dga if end_dga is not None else endomorphism_dga(algebra, v)
        if mc.algebra is not self.end:
            raise MCError("MC element lives in the wrong endomorphism algebra")
        _require_mc(self.end, mc)
        self.mc = mc
        self.name = name or "V(x)%s" % algebra.name

    def module(self) -> DgModule:
        """The dg module on basis (v, a) with D = 1 (x) d + x."""
        a = self.algebra
        ring = a.ring
        basis = [((vl, al), self.v.degree[vl] + a.gm.degree[al])
                 for vl in self.v.labels for al in a.gm.labels]
        gm = GradedModule(ring, basis)
        action = {}
        for (al, bl), prod in a.mult.items():
            for vl in self.v.labels:
                action[((vl, al), bl)] = {(vl, rl): c for rl, c in prod.items()}
        diff = {}
        for vl in self.v.labels:
            sv = ring.coerce((-1) ** self.v.degree[vl])
            for al in a.gm.labels:
                out = {}
                for rl, c in a.diff.get(al, {}).items():
                    out[(vl, rl)] = ring.mul(sv, c)
                # x . (v (x) a): terms ("E", u, w, cl) with u = vl
                for el, ce in self.mc.value.coeffs.items():
                    _, u, w, cl = el
                    if u != vl:
                        continue
                    sign = ring.coerce((-1) ** (a.gm.degree[cl] * self.v.degree[vl]))
                    for rl, c in a.mul_labels(cl, al).items():
                        key = (w, rl)
                        out[key] = ring.add(out.get(key, ring.zero()),
                                            ring.mul(ring.mul(sign, ce), c))
                out = {k: v for k, v in out.items() if v != 0}
                if out:
                    diff[(vl, al)] = out
        return DgModule(gm, a, action, diff, name=self.name)

    def cohomology(self) -> CohomologyReport:
        return cohomology(self.module().complex())

    def weight_component(self, w: int) -> Element:
        """The part of the twisting with algebra-degree w."""
        a = self.algebra
        return Element(self.end, {l: c for l, c in self.mc.value.coeffs.items()
                                  if a.gm.degree[l[3]] == w})


def trivial_twisted_module(v: GradedModule, a: DgAlgebra) -> TwistedModule:
    """V (x) A with x encoding only the differential of V (here zero)."""
    end = endomorphism_dga(a, v)
    return TwistedModule(v, a, zero_mc(end), end_dga=end)


# ---------------------------------------------------------------------------
# degreewise matrices of hom twists, H^0 and the search layer
# ---------------------------------------------------------------------------


def _degree_matrix(m: DgModule, deg: int) -> tuple:
    """(matrix of d: M^deg -> M^{deg+1}, source labels, target labels)."""
    src = list(m.gm.labels_of_degree(deg))
    dst = list(m.gm.labels_of_degree(deg + 1))
    ring = m.ring
    mat = ExactMatrix.zeros(ring, len(dst), len(src))
    ix = {l: i for i, l in enumerate(dst)}
    for j, l in enumerate(src):
        for r, c in m.diff.get(l, {}).items():
            mat.set_entry(ix[r], j, c)
    return mat, src, dst


def closed_degree_zero(a: DgAlgebra, x: MCElement, y: MCElement):
    """Basis (as coefficient dicts) of {g in A^0 : dg + yg - gx = 0}."""
    hm = hom_twist(a, x, y)
    mat, src, _ = _degree_matrix(hm, 0)
    return [
        {src[i]: c for i, c in enumerate(vec) if c != 0}
        for vec in kernel_basis(mat)
    ], src


@dataclass
class SearchResult:
    kind: str                      # "equivalent" | "distinguished" | "unknown"
    certificate: HomotopyGaugeCertificate | None = None
    gauge: Element | None = None   # invertible gauge when one was found
    invariants: dict = field(default_factory=dict)
    report: dict = field(default_factory=dict)


def twist_invariants(a: DgAlgebra, x: MCElement) -> dict:
    """Homotopy-gauge invariants of x: H of A^[x] and of A^x."""
    module_rep = cohomology(twist_module(a, x).complex())
    algebra_rep = cohomology(twist_algebra(a, x).complex())
    return {"module_twist": module_rep, "algebra_twist": algebra_rep}


def search_homotopy_gauge(a: DgAlgebra, x: MCElement, y: MCElement,
                          budget: int = 40, seed: int = 0) -> SearchResult:
    """Decide homotopy gauge equivalence where possible.

    Stage 1 compares computable invariants (cohomology of the module and
    algebra twists, with torsion over Z); a difference is a proof of
    distinction.  Stage 2 solves the linear condition (1) for g and hunts
    for an invertible solution (gauge equivalence); stage 3 samples closed
    g and solves the linear system for (h, wx, wy).  Equivalence is only
    ever reported with a certificate that re-verifies; exhausted budgets
    return Unknown, never a false claim.
    """
    rng = random.Random(seed)
    inv_x = twist_invariants(a, x)
    inv_y = twist_invariants(a, y)
    invariants = {"x": inv_x, "y": inv_y}
    for key in ("module_twist", "algebra_twist"):
        if inv_x[key] != inv_y[key]:
            return SearchResult("distinguished", invariants=invariants,
                                report={"differs": key})

    candidates, deg0 = closed_degree_zero(a, x, y)
    report = {"closed_degree0_dim": len(candidates), "samples": 0,
              "sample_bound": 1}
    if not candidates:
        return SearchResult("unknown", invariants=invariants, report=report)

    def combine(bound):
        out = {}
        for cand in candidates:
            c = rng.randint(-bound, bound)
            if c:
                out = vec_add(a.ring, out, vec_scale(a.ring, a.ring.coerce(c), cand))
        return Element(a, out)

    # basis candidates first, then random combinations with doubling bound
    trials = [Element(a, cand) for cand in candidates]
    bound = 1
    while len(trials) < len(candidates) + budget:
        trials.append(combine(bound))
        if len(trials) % (len(candidates) + 1) == 0:
            bound *= 2
    report["sample_bound"] = bound

    # stage 2: invertible solutions of condition (1) give gauge equivalence
    for g in trials:
        if g.is_zero():
            continue
        report["samples"] += 1
        ginv = algebra_inverse(a, g)
        if ginv is None:
            continue
        cert = HomotopyGaugeCertificate(g, ginv, a.zero(), a.zero())
        ok, _ = verify_homotopy_gauge(a, x, y, cert)
        if ok:
            return SearchResult("equivalent", certificate=cert, gauge=g,
                                invariants=invariants, report=report)

    # stage 3: homotopy gauge via a linear solve for (h, wx, wy) given g
    for g in trials:
        if g.is_zero():
            continue
        cert = _solve_homotopy_given_g(a, x, y, g)
        if cert is not None:
            ok, _ = verify_homotopy_gauge(a, x, y, cert)
            if ok:
                return SearchResult("equivalent", certificate=cert,
                                    invariants=invariants, report=report)
    if a.ring.is_field:
        space = 2 * report["sample_bound"] + 1
        report["schwartz_zippel"] = {
            "det_degree_bound": len(deg0),
            "sample_space": space,
            "failure_probability_bound": "%d/%d" % (len(deg0), space),
        }
    return SearchResult("unknown", invariants=invariants, report=report)


def _solve_homotopy_given_g(a: DgAlgebra, x: MCElement, y: MCElement, g: Element):
    """Solve conditions (2)-(4) for (h, wx, wy) linearly, given g."""
    ring = a.ring
    deg0 = list(a.gm.labels_of_degree(0))
    degm1 = list(a.gm.labels_of_degree(-1))
    unknowns = [("h", l) for l in deg0] + [("wx", l) for l in degm1] + \
        [("wy", l) for l in degm1]
    if not unknowns:
        return None
    uix = {u: i for i, u in enumerate(unknowns)}
    rows = {}
    rhs = {}

    def add_term(eqkey, col, c):
        if c == 0:
            return
        row = rows.setdefault(eqkey, {})
        row[col] = ring.add(row.get(col, ring.zero()), c)

    one = ring.one()
    # (2) dh + xh - hy = 0, coefficients per degree-1 label
    for l in deg0:
        e = {l: one}
        expr = vec_add(ring, a.diff.get(l, {}), a.mul_dicts(x.value.coeffs, e))
        expr = vec_sub(ring, expr, a.mul_dicts(e, y.value.coeffs))
        for r, c in expr.items():
            add_term(("c2", r), uix[("h", l)], c)
    # (3) hg - d^x(wx) = 1
    for l in deg0:
        for r, c in a.mul_dicts({l: one}, g.coeffs).items():
            add_term(("c3", r), uix[("h", l)], c)
    for l in degm1:
        e = {l: one}
        dx = vec_add(ring, a.diff.get(l, {}), a.mul_dicts(x.value.coeffs, e))
        dx = vec_add(ring, dx, a.mul_dicts(e, x.value.coeffs))  # -(-1)^{-1} a x
        for r, c in dx.items():
            add_term(("c3", r), uix[("wx", l)], ring.neg(c))
    for r, c in a.unit.items():
        rhs[("c3", r)] = c
    # (4) gh - d^y(wy) = 1
    for l in deg0:
        for r, c in a.mul_dicts(g.coeffs, {l: one}).items():
            add_term(("c4", r), uix[("h", l)], c)
    for l in degm1:
        e = {l: one}
        dy = vec_add(ring, a.diff.get(l, {}), a.mul_dicts(y.value.coeffs, e))
        dy = vec_add(ring, dy, a.mul_dicts(e, y.value.coeffs))
        for r, c in dy.items():
            add_term(("c4", r), uix[("wy", l)], ring.neg(c))
    for r, c in a.unit.items():
        key = ("c4", r)
        rhs[key] = ring.add(rhs.get(key, ring.zero()), c)

    eqkeys = sorted(set(rows) | set(rhs), key=str)
    mat = ExactMatrix.zeros(ring, len(eqkeys), len(unknowns))
    for i, k in enumerate(eqkeys):
        for j, c in rows.get(k, {}).items():
            mat.set_entry(i, j, c)
    target = [rhs.get(k, ring.zero()) for k in eqkeys]
    sol = solve_linear(mat, target)
    if sol is None:
        return None
    vals = sol[0]
    h = Element(a, {l: vals[uix[("h", l)]] for l in deg0
                    if vals[uix[("h", l)]] != 0})
    wx = Element(a, {l: vals[uix[("wx", l)]] for l in degm1
                     if vals[uix[("wx", l)]] != 0})
    wy = Element(a, {l: vals[uix[("wy", l)]] for l in degm1
                     if vals[uix[("wy", l)]] != 0})
    return HomotopyGaugeCertificate(g, h, wx, wy)


# ---------------------------------------------------------------------------
# the homotopy category on a finite set of MC elements
# ---------------------------------------------------------------------------


class H0Category:
    """H^0 of the hom twists between a finite list of MC elements.

    For each pair (i, j) a basis of H^0(A^[x_i, x_j]) is computed over a
    field; classes compose through multiplication in A and the table
    records the structure constants.  ``isomorphic`` lists the pairs whose
    classes contain mutually inverse elements up to coboundary.
    """

    def __init__(self, a: DgAlgebra, xs, seed: int = 0):
        if not a.ring.is_field:
            raise MCError("H^0 tables are computed over field coefficients")
        self.a = a
        self.xs = list(xs)
        self.ring = a.ring
        self.reps = {}       # (i, j) -> list of coefficient dicts
        self._exact = {}     # (i, j) -> list of coefficient dicts spanning exact part
        self._src = {}
        n = len(self.xs)
        for i in range(n):
            for j in range(n):
                self._compute(i, j)
        self.isomorphic = self._find_isos(seed)

    def _compute(self, i, j):
        hm = hom_twist(self.a, self.xs[i], self.xs[j])
        mat0, src, _ = _degree_matrix(hm, 0)
        matm1, srcm1, dst0 = _degree_matrix(hm, -1)
        closed = kernel_basis(mat0)
        ring = self.ring
        ix = {l: k for k, l in enumerate(src)}
        exact_vecs = []
        for l in srcm1:
            img = hm.diff.get(l, {})
            vec = [ring.zero()] * len(src)
            for r, c in img.items():
                vec[ix[r]] = c
            exact_vecs.append(vec)
        # representatives: closed vectors independent modulo the exact span
        basis = []
        ambient = list(exact_vecs)
        cur_rank = _rank_of(ring, ambient, len(src))
        for vec in closed:
            cand = ambient + [vec]
            r = _rank_of(ring, cand, len(src))
            if r > cur_rank:
                ambient = cand
                cur_rank = r
                basis.append(vec)
        self.reps[(i, j)] = [
            {src[k]: c for k, c in enumerate(v) if c != 0} for v in basis]
        self._exact[(i, j)] = exact_vecs
        self._src[(i, j)] = src

    def h0_dim(self, i, j) -> int:
        return len(self.reps[(i, j)])

    def class_coordinates(self, i, j, element: Element):
        """Coordinates of a closed degree-0 element in the H^0 basis."""
        ring = self.ring
        src = self._src[(i, j)]
        reps = self.reps[(i, j)]
        exact = self._exact[(i, j)]
        cols = []
        for rep in reps:
            cols.append([rep.get(l, ring.zero()) for l in src])
        for v in exact:
            cols.append(list(v))
        mat = ExactMatrix(ring, len(src), len(cols),
                          [[cols[c][r] for c in range(len(cols))] for r in range(len(src))])
        target = [element.coeffs.get(l, ring.zero()) for l in src]
        sol = solve_linear(mat, target)
        if sol is None:
            raise MCError("element is not closed of degree 0 in this hom twist")
        return sol[0][:len(reps)]

    def compose_classes(self, i, j, k, cj: int, ci: int):
        """[rep_{cj} of H^0(j,k)] o [rep_{ci} of H^0(i,j)] in H^0(i,k)."""
        g = Element(self.a, self.reps[(j, k)][cj])
        f = Element(self.a, self.reps[(i, j)][ci])
        return self.class_coordinates(i, k, g * f)

    def identity_class(self, i):
        return self.class_coordinates(i, i, self.a.one())

    def table(self):
        """All composition structure constants: (i, j, k, cj, ci) -> coords."""
        n = len(self.xs)
        out = {}
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for cj in range(self.h0_dim(j, k)):
                        for ci in range(self.h0_dim(i, j)):
                            out[(i, j, k, cj, ci)] = self.compose_classes(i, j, k, cj, ci)
        return out

    def _find_isos(self, seed):
        rng = random.Random(seed)
        n = len(self.xs)
        found = set((i, i) for i in range(n))
        for i in range(n):
            for j in range(n):
                if i == j or (i, j) in found:
                    continue
                for rep in self.reps[(i, j)]:
                    cert = _solve_homotopy_given_g(self.a, self.xs[i], self.xs[j],
                                                   Element(self.a, rep))
                    if cert is not None:
                        ok, _ = verify_homotopy_gauge(self.a, self.xs[i], self.xs[j], cert)
                        if ok:
                            found.add((i, j))
                            found.add((j, i))
                            break
                else:
                    for _ in range(6):
                        coeffs = [rng.randint(-2, 2) for _ in self.reps[(i, j)]]
                        acc = {}
                        for c, rep in zip(coeffs, self.reps[(i, j)]):
                            if c:
                                acc = vec_add(self.ring, acc,
                                              vec_scale(self.ring, self.ring.coerce(c), rep))
                        if not acc:
                            continue
                        cert = _solve_homotopy_given_g(self.a, self.xs[i], self.xs[j],
                                                       Element(self.a, acc))
                        if cert is not None and verify_homotopy_gauge(
                                self.a, self.xs[i], self.xs[j], cert)[0]:
                            found.add((i, j))
                            found.add((j, i))
                            break
        return sorted((i, j) for (i, j) in found if i != j)


def _rank_of(ring: Ring, vectors, width: int) -> int:
    if not vectors:
        return 0
    mat = ExactMatrix(ring, len(vectors), width, [list(v) for v in vectors])
    return rank(mat)


def mc_category_h0(a: DgAlgebra, xs, seed: int = 0) -> H0Category:
    return H0Category(a, xs, seed=seed)
