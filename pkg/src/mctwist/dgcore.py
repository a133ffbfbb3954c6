"""Finite-basis dg algebras and dg modules with mechanically verified axioms.

A dg algebra is stored by structure constants: a finite graded basis, a
sparse multiplication table, a differential matrix and a unit vector.  The
four algebra axioms (d^2 = 0, Leibniz, associativity, unit laws) are never
assumed: :func:`check_dga` verifies them exactly and reports a witness for
every violation.  Constructors elsewhere in the package are tested against
this checker, so "is a dg algebra" is always a theorem about the data, not
an assumption.

Sign conventions are Koszul throughout: ``d(ab) = d(a) b + (-1)^{|a|} a d(b)``
and ``(a (x) u)(b (x) v) = (-1)^{|u||b|} ab (x) uv`` in tensor products.
Degrees are arbitrary integers with explicit finite support; there is no
implicit truncation anywhere.
"""

from __future__ import annotations

from .exactlinalg import (
    ChainComplexSpec,
    ExactMatrix,
    Ring,
    cohomology,
    solve_linear,
)


class DgError(ValueError):
    """Precondition failure in a dg-core operation."""


# ---------------------------------------------------------------------------
# coefficient dictionaries
#
# Elements of modules and algebras are sparse dicts {label: scalar}; the
# helpers below keep them normalized (no zero values).
# ---------------------------------------------------------------------------


def vec_add(ring: Ring, a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        s = ring.add(out.get(k, ring.zero()), v)
        if s == 0:
            out.pop(k, None)
        else:
            out[k] = s
    return out


def vec_scale(ring: Ring, c, a: dict) -> dict:
    if c == 0:
        return {}
    return {k: ring.mul(c, v) for k, v in a.items()}


def vec_sub(ring: Ring, a: dict, b: dict) -> dict:
    return vec_add(ring, a, vec_scale(ring, ring.coerce(-1), b))


class GradedModule:
    """A finitely supported graded free module: labelled basis with degrees."""

    def __init__(self, ring: Ring, basis):
        self.ring = ring
        self.labels = tuple(l for l, _ in basis)
        if len(set(self.labels)) != len(self.labels):
            raise DgError("duplicate basis labels")
        self.degree = {l: int(d) for l, d in basis}
        self._by_degree = {}
        for l, d in self.degree.items():
            self._by_degree.setdefault(d, []).append(l)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def degrees(self):
        return sorted(self._by_degree)

    def labels_of_degree(self, d: int):
        return tuple(self._by_degree.get(d, ()))

    def basis(self):
        return [(l, self.degree[l]) for l in self.labels]

    def shifted(self, k: int) -> "GradedModule":
        """V[k] with V[k]^i = V^{i+k}: every degree drops by k."""
        return GradedModule(self.ring, [(l, d - k) for l, d in self.basis()])

    def __repr__(self):
        return "GradedModule(%s, dim %d)" % (self.ring.name, self.dim)


class Element:
    """A sparse algebra element supporting +, -, * and d()."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: "DgAlgebra", coeffs: dict):
        self.algebra = algebra
        self.coeffs = {k: v for k, v in coeffs.items() if v != 0}

    def __add__(self, other):
        other = self.algebra.as_element(other)
        return Element(self.algebra, vec_add(self.algebra.ring, self.coeffs, other.coeffs))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        other = self.algebra.as_element(other)
        return Element(self.algebra, vec_sub(self.algebra.ring, self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return self.algebra.as_element(other).__sub__(self)

    def __neg__(self):
        return Element(self.algebra, vec_scale(self.algebra.ring,
                                               self.algebra.ring.coerce(-1), self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Element):
            if other.algebra is not self.algebra:
                raise DgError("elements of different algebras")
            return Element(self.algebra,
                           self.algebra.mul_dicts(self.coeffs, other.coeffs))
        return Element(self.algebra,
                       vec_scale(self.algebra.ring, self.algebra.ring.coerce(other),
                                 self.coeffs))

    def __rmul__(self, other):
        # scalar * element
        return Element(self.algebra,
                       vec_scale(self.algebra.ring, self.algebra.ring.coerce(other),
                                 self.coeffs))

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.algebra is other.algebra and self.coeffs == other.coeffs
        return self.coeffs == self.algebra.as_element(other).coeffs

    def d(self) -> "Element":
        return Element(self.algebra, self.algebra.d_dict(self.coeffs))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_homogeneous(self, degree=None):
        degs = {self.algebra.gm.degree[l] for l in self.coeffs}
        if degree is not None:
            return degs <= {degree}
        return len(degs) <= 1

    def component(self, degree: int) -> "Element":
        return Element(self.algebra,
                       {l: v for l, v in self.coeffs.items()
                        if self.algebra.gm.degree[l] == degree})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join("%s*%r" % (v, l) for l, v in sorted(self.coeffs.items(),
                                                              key=lambda kv: str(kv[0])))


class DgAlgebra:
    """A dg algebra given by structure constants over an exact ring.

    ``mult`` maps (left label, right label) to a coefficient dict; missing
    keys are zero products.  ``diff`` maps a label to the coefficient dict
    of its differential.  ``filtration`` is an optional nonnegative integer
    weight per label, additive under multiplication and preserved by d,
    used only to prune axiom checks on large truncated algebras; its own
    soundness is verified by :func:`check_dga` before any pruning.
    """

    def __init__(self, gm: GradedModule, unit: dict, mult: dict, diff: dict,
                 filtration=None, name: str = ""):
        self.gm = gm
        self.ring = gm.ring
        self.name = name
        self.unit = {k: self.ring.coerce(v) for k, v in unit.items() if v != 0}
        self.mult = {}
        for (a, b), out in mult.items():
            clean = {k: self.ring.coerce(v) for k, v in out.items() if v != 0}
            if clean:
                self.mult[(a, b)] = clean
        self.diff = {}
        for a, out in diff.items():
            clean = {k: self.ring.coerce(v) for k, v in out.items() if v != 0}
            if clean:
                self.diff[a] = clean
        self.filtration = dict(filtration) if filtration else None
        self._validate_degrees()

    def _validate_degrees(self):
        deg = self.gm.degree
        for l in self.unit:
            if deg[l] != 0:
                raise DgError("unit has a component in degree %d" % deg[l])
        for (a, b), out in self.mult.items():
            want = deg[a] + deg[b]
            for r in out:
                if deg[r] != want:
                    raise DgError("product %r*%r not degree-additive" % (a, b))
        for a, out in self.diff.items():
            for r in out:
                if deg[r] != deg[a] + 1:
                    raise DgError("differential of %r is not degree +1" % (a,))

    # -- elements ------------------------------------------------------------

    def element(self, coeffs) -> Element:
        if isinstance(coeffs, Element):
            return coeffs
        if isinstance(coeffs, dict):
            bad = [l for l in coeffs if l not in self.gm.degree]
            if bad:
                raise DgError("unknown basis labels %r" % (bad,))
            return Element(self, {l: self.ring.coerce(v) for l, v in coeffs.items()})
        # a bare label
        if coeffs not in self.gm.degree:
            raise DgError("unknown basis label %r" % (coeffs,))
        return Element(self, {coeffs: self.ring.one()})

    def as_element(self, x) -> Element:
        if isinstance(x, Element):
            if x.algebra is not self:
                raise DgError("element of a different algebra")
            return x
        if isinstance(x, dict):
            return self.element(x)
        # scalar -> multiple of the unit
        c = self.ring.coerce(x)
        return Element(self, vec_scale(self.ring, c, self.unit))

    def one(self) -> Element:
        return Element(self, dict(self.unit))

    def zero(self) -> Element:
        return Element(self, {})

    def basis_element(self, label) -> Element:
        return self.element(label)

    # -- structure-constant arithmetic ----------------------------------------

    def mul_labels(self, a, b) -> dict:
        return self.mult.get((a, b), {})

    def mul_dicts(self, x: dict, y: dict) -> dict:
        ring = self.ring
        out = {}
        for a, ca in x.items():
            for b, cb in y.items():
                prod = self.mult.get((a, b))
                if not prod:
                    continue
                c = ring.mul(ca, cb)
                for r, cr in prod.items():
                    s = ring.add(out.get(r, ring.zero()), ring.mul(c, cr))
                    if s == 0:
                        out.pop(r, None)
                    else:
                        out[r] = s
        return out

    def d_dict(self, x: dict) -> dict:
        ring = self.ring
        out = {}
        for a, ca in x.items():
            da = self.diff.get(a)
            if not da:
                continue
            for r, cr in da.items():
                s = ring.add(out.get(r, ring.zero()), ring.mul(ca, cr))
                if s == 0:
                    out.pop(r, None)
                else:
                    out[r] = s
        return out

    # -- complexes -------------------------------------------------------------

    def complex(self) -> ChainComplexSpec:
        """The underlying cochain complex (A, d) as matrices."""
        return complex_of(self.ring, self.gm, self.diff)

    def cohomology(self):
        return cohomology(self.complex())

    def change_ring(self, ring: Ring) -> "DgAlgebra":
        conv = lambda d: {k: ring.coerce(v) for k, v in d.items()}
        return DgAlgebra(
            GradedModule(ring, self.gm.basis()),
            conv(self.unit),
            {k: conv(v) for k, v in self.mult.items()},
            {k: conv(v) for k, v in self.diff.items()},
            filtration=self.filtration,
            name=self.name,
        )

    def __repr__(self):
        return "DgAlgebra(%s, %s, dim %d)" % (self.name or "?", self.ring.name, self.gm.dim)


def complex_of(ring: Ring, gm: GradedModule, diff: dict) -> ChainComplexSpec:
    """Assemble the per-degree matrices of a differential on a graded basis."""
    degrees = gm.degrees()
    dims = {d: len(gm.labels_of_degree(d)) for d in degrees}
    index = {}
    for d in degrees:
        for i, l in enumerate(gm.labels_of_degree(d)):
            index[l] = i
    maps = {}
    for d in degrees:
        rows = dims.get(d + 1, 0)
        cols = dims[d]
        if rows == 0 or cols == 0:
            continue
        m = ExactMatrix.zeros(ring, rows, cols)
        for j, l in enumerate(gm.labels_of_degree(d)):
            for r, c in diff.get(l, {}).items():
                m.set_entry(index[r], j, ring.coerce(c))
        maps[d] = m
    return ChainComplexSpec(ring, dims, maps)


# ---------------------------------------------------------------------------
# axiom checking
# ---------------------------------------------------------------------------


def check_dga(a: DgAlgebra, max_failures: int = 10) -> dict:
    """Verify d^2 = 0, Leibniz, associativity and the unit laws exactly.

    Returns {"ok": bool, "failures": [...]} where every failure names the
    axiom and a witness tuple of basis labels.  If the algebra carries a
    filtration hint, its additivity is verified first and then triples
    whose total weight exceeds the support bound are skipped (both sides
    vanish for such triples once additivity is established).
    """
    ring = a.ring
    deg = a.gm.degree
    failures = []
    warnings = []

    def record(axiom, witness, detail=""):
        if len(failures) < max_failures:
            failures.append({"axiom": axiom, "witness": witness, "detail": detail})

    # unit laws
    for l in a.gm.labels:
        e = {l: ring.one()}
        if a.mul_dicts(a.unit, e) != e:
            record("unit-left", (l,))
        if a.mul_dicts(e, a.unit) != e:
            record("unit-right", (l,))

    # d^2 = 0
    for l in a.gm.labels:
        dd = a.d_dict(a.diff.get(l, {}))
        if dd:
            record("d-squared", (l,), "d^2(%r) = %r" % (l, dd))

    # Leibniz: d(xy) = d(x) y + (-1)^{|x|} x d(y)
    for x in a.gm.labels:
        dx = a.diff.get(x, {})
        sign = ring.coerce((-1) ** deg[x])
        for y in a.gm.labels:
            lhs = a.d_dict(a.mul_labels(x, y))
            rhs = vec_add(ring,
                          a.mul_dicts(dx, {y: ring.one()}),
                          vec_scale(ring, sign,
                                    a.mul_dicts({x: ring.one()}, a.diff.get(y, {}))))
            if lhs != rhs:
                record("leibniz", (x, y))

    # filtration soundness, then associativity with pruning; an unsound hint
    # only disables the pruning, it is not an algebra axiom failure
    filt = a.filtration
    bound = None
    if filt is not None:
        bound = max(filt.values(), default=0)
        ok = all(l in filt for l in a.gm.labels)
        if ok:
            for (x, y), out in a.mult.items():
                if filt[x] + filt[y] > bound or any(filt[r] != filt[x] + filt[y] for r in out):
                    ok = False
                    warnings.append({"witness": (x, y),
                                     "detail": "filtration hint not additive; pruning disabled"})
                    break
        else:
            warnings.append({"witness": (), "detail": "filtration hint misses labels"})
            ok = False
        if not ok:
            filt = None

    pairs = set(a.mult.keys())
    for x in a.gm.labels:
        for y in a.gm.labels:
            xy = a.mult.get((x, y))
            for z in a.gm.labels:
                if filt is not None and filt[x] + filt[y] + filt[z] > bound:
                    continue
                if xy is None and (y, z) not in pairs:
                    continue
                lhs = a.mul_dicts(xy or {}, {z: ring.one()})
                rhs = a.mul_dicts({x: ring.one()}, a.mul_labels(y, z))
                if lhs != rhs:
                    record("associativity", (x, y, z))
    return {"ok": not failures, "failures": failures, "warnings": warnings}


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def tensor_dga(a: DgAlgebra, b: DgAlgebra, name: str = "") -> DgAlgebra:
    """A (x) B with the Koszul product and differential d(x)1 + 1(x)d."""
    if a.ring != b.ring:
        raise DgError("tensor factors over different rings")
    ring = a.ring
    basis = [((la, lb), a.gm.degree[la] + b.gm.degree[lb])
             for la in a.gm.labels for lb in b.gm.labels]
    gm = GradedModule(ring, basis)
    unit = {}
    for la, ca in a.unit.items():
        for lb, cb in b.unit.items():
            unit[(la, lb)] = ring.mul(ca, cb)
    mult = {}
    for (la, la2), pa in a.mult.items():
        for (lb, lb2), pb in b.mult.items():
            sign = ring.coerce((-1) ** (b.gm.degree[lb] * a.gm.degree[la2]))
            out = {}
            for ra, ca in pa.items():
                for rb, cb in pb.items():
                    out[(ra, rb)] = ring.mul(sign, ring.mul(ca, cb))
            if out:
                mult[((la, lb), (la2, lb2))] = out
    diff = {}
    for la in a.gm.labels:
        for lb in b.gm.labels:
            out = {}
            for ra, c in a.diff.get(la, {}).items():
                out[(ra, lb)] = ring.add(out.get((ra, lb), ring.zero()), c)
            sgn = ring.coerce((-1) ** a.gm.degree[la])
            for rb, c in b.diff.get(lb, {}).items():
                out[(la, rb)] = ring.add(out.get((la, rb), ring.zero()), ring.mul(sgn, c))
            out = {k: v for k, v in out.items() if v != 0}
            if out:
                diff[(la, lb)] = out
    filtration = None
    if a.filtration is not None and b.filtration is not None:
        filtration = {(la, lb): a.filtration[la] + b.filtration[lb]
                      for la in a.gm.labels for lb in b.gm.labels}
    return DgAlgebra(gm, unit, mult, diff, filtration=filtration,
                     name=name or "%s(x)%s" % (a.name, b.name))


def ground_dga(ring: Ring, name: str = "k") -> DgAlgebra:
    """The ground ring as a dg algebra on one degree-0 generator."""
    gm = GradedModule(ring, [("1", 0)])
    return DgAlgebra(gm, {"1": 1}, {(("1"), ("1")): {"1": 1}}, {}, name=name)


def endomorphism_dga(a: DgAlgebra, v: GradedModule, name: str = "") -> DgAlgebra:
    """End(V) (x) A with convolution product and differential 1 (x) d.

    Basis labels are ("E", src, dst, alabel) for the map sending basis
    element ``src`` to ``dst`` tensored with the algebra label; its degree
    is deg(dst) - deg(src) + deg(alabel).  Composition pairs dst of the
    right factor against src of the left factor, with the Koszul sign
    (-1)^{|a| |psi|} for (phi (x) a)(psi (x) b).
    """
    ring = a.ring
    if v.ring != ring:
        raise DgError("module and algebra rings differ")
    basis = []
    for u in v.labels:
        for w in v.labels:
            for al in a.gm.labels:
                basis.append((("E", u, w, al),
                              v.degree[w] - v.degree[u] + a.gm.degree[al]))
    gm = GradedModule(ring, basis)
    unit = {("E", u, u, al): c for u in v.labels for al, c in a.unit.items()}
    mult = {}
    for u in v.labels:
        for w in v.labels:
            for u2 in v.labels:
                # (E_{u->w} o E_{u2->u}) = E_{u2->w}
                for (al, bl), prod in a.mult.items():
                    left = ("E", u, w, al)
                    right = ("E", u2, u, bl)
                    psi_deg = v.degree[u] - v.degree[u2]
                    sign = ring.coerce((-1) ** (a.gm.degree[al] * psi_deg))
                    out = {("E", u2, w, rl): ring.mul(sign, c) for rl, c in prod.items()}
                    if out:
                        mult[(left, right)] = out
    diff = {}
    for u in v.labels:
        for w in v.labels:
            # d(phi (x) a) = (-1)^{|phi|} phi (x) d(a)
            sign = ring.coerce((-1) ** (v.degree[w] - v.degree[u]))
            for al, dal in ((al, a.diff[al]) for al in a.gm.labels if al in a.diff):
                diff[("E", u, w, al)] = {("E", u, w, rl): ring.mul(sign, c)
                                         for rl, c in dal.items()}
    filtration = None
    if a.filtration is not None:
        filtration = {("E", u, w, al): a.filtration[al]
                      for u in v.labels for w in v.labels for al in a.gm.labels}
    return DgAlgebra(gm, unit, mult, diff, filtration=filtration,
                     name=name or "End(V)(x)%s" % a.name)


# ---------------------------------------------------------------------------
# dg modules
# ---------------------------------------------------------------------------


class DgModule:
    """A right dg module with finite basis, action constants and differential.

    ``action`` maps (module label, algebra label) to a coefficient dict over
    module labels; ``diff`` maps a module label to its differential.
    """

    def __init__(self, gm: GradedModule, algebra: DgAlgebra, action: dict, diff: dict,
                 name: str = ""):
        self.gm = gm
        self.algebra = algebra
        self.ring = gm.ring
        self.name = name
        self.action = {}
        for (m, al), out in action.items():
            clean = {k: self.ring.coerce(v) for k, v in out.items() if v != 0}
            if clean:
                self.action[(m, al)] = clean
        self.diff = {}
        for m, out in diff.items():
            clean = {k: self.ring.coerce(v) for k, v in out.items() if v != 0}
            if clean:
                self.diff[m] = clean

    def d_dict(self, x: dict) -> dict:
        ring = self.ring
        out = {}
        for m, cm in x.items():
            for r, cr in self.diff.get(m, {}).items():
                s = ring.add(out.get(r, ring.zero()), ring.mul(cm, cr))
                if s == 0:
                    out.pop(r, None)
                else:
                    out[r] = s
        return out

    def act(self, x: dict, a: dict) -> dict:
        ring = self.ring
        out = {}
        for m, cm in x.items():
            for al, ca in a.items():
                res = self.action.get((m, al))
                if not res:
                    continue
                c = ring.mul(cm, ca)
                for r, cr in res.items():
                    s = ring.add(out.get(r, ring.zero()), ring.mul(c, cr))
                    if s == 0:
                        out.pop(r, None)
                    else:
                        out[r] = s
        return out

    def complex(self) -> ChainComplexSpec:
        return complex_of(self.ring, self.gm, self.diff)

    def cohomology(self):
        return cohomology(self.complex())

    def check(self, max_failures: int = 10) -> dict:
        """Verify D^2 = 0, unitality, associativity and module Leibniz."""
        ring = self.ring
        failures = []

        def record(axiom, witness):
            if len(failures) < max_failures:
                failures.append({"axiom": axiom, "witness": witness})

        for m in self.gm.labels:
            if self.d_dict(self.diff.get(m, {})):
                record("D-squared", (m,))
            e = {m: ring.one()}
            if self.act(e, self.algebra.unit) != e:
                record("unit", (m,))
        for m in self.gm.labels:
            e = {m: ring.one()}
            sign = ring.coerce((-1) ** self.gm.degree[m])
            for al in self.algebra.gm.labels:
                av = {al: ring.one()}
                lhs = self.d_dict(self.act(e, av))
                rhs = vec_add(ring,
                              self.act(self.diff.get(m, {}), av),
                              vec_scale(ring, sign,
                                        self.act(e, self.algebra.diff.get(al, {}))))
                if lhs != rhs:
                    record("module-leibniz", (m, al))
                for bl in self.algebra.gm.labels:
                    l = self.act(self.act(e, av), {bl: ring.one()})
                    r = self.act(e, self.algebra.mul_labels(al, bl))
                    if l != r:
                        record("module-associativity", (m, al, bl))
        return {"ok": not failures, "failures": failures}

    def shifted(self, k: int) -> "DgModule":
        """M[k]: degrees relabelled by -k, differential scaled by (-1)^k."""
        sign = self.ring.coerce((-1) ** k)
        diff = {m: vec_scale(self.ring, sign, out) for m, out in self.diff.items()}
        return DgModule(self.gm.shifted(k), self.algebra, self.action, diff,
                        name="%s[%d]" % (self.name, k))

    def __repr__(self):
        return "DgModule(%s, dim %d over %s)" % (self.name or "?", self.gm.dim,
                                                 self.algebra.name or "?")


def algebra_as_module(a: DgAlgebra) -> DgModule:
    """A as a right module over itself."""
    action = {}
    for (x, y), out in a.mult.items():
        action[(x, y)] = out
    return DgModule(a.gm, a, action, dict(a.diff), name="%s as module" % a.name)


def module_map_is_closed(f: dict, m: DgModule, n: DgModule) -> bool:
    """f: M -> N (degree 0, by label dict) commutes with the differentials."""
    ring = m.ring
    for l in m.gm.labels:
        img = f.get(l, {})
        lhs = n.d_dict(img)
        rhs = {}
        for r, c in m.diff.get(l, {}).items():
            rhs = vec_add(ring, rhs, vec_scale(ring, c, f.get(r, {})))
        if lhs != rhs:
            return False
    return True


def module_map_is_linear(f: dict, m: DgModule, n: DgModule) -> bool:
    ring = m.ring
    for l in m.gm.labels:
        for al in m.algebra.gm.labels:
            lhs = {}
            for r, c in m.act({l: ring.one()}, {al: ring.one()}).items():
                lhs = vec_add(ring, lhs, vec_scale(ring, c, f.get(r, {})))
            rhs = n.act(f.get(l, {}), {al: ring.one()})
            if lhs != rhs:
                return False
    return True


def cone(f: dict, m: DgModule, n: DgModule, name: str = "") -> DgModule:
    """The cone on a closed degree-0 map f: M -> N of dg modules.

    Underlying module M[1] (+) N; the differential is upper triangular,
    (x, y) |-> (-d_M x, f(x) + d_N y).  For f = 0 this is the direct sum
    M[1] (+) N with block-diagonal differential, and cone(id) is acyclic.
    """
    if m.algebra is not n.algebra:
        raise DgError("cone over different algebras")
    ring = m.ring
    for l in m.gm.labels:
        for r in f.get(l, {}):
            if n.gm.degree[r] != m.gm.degree[l]:
                raise DgError("cone input is not of degree 0")
    if not module_map_is_closed(f, m, n):
        raise DgError("cone input is not closed")
    if not module_map_is_linear(f, m, n):
        raise DgError("cone input is not a module map")
    basis = [(("M", l), m.gm.degree[l] - 1) for l in m.gm.labels]
    basis += [(("N", l), n.gm.degree[l]) for l in n.gm.labels]
    gm = GradedModule(ring, basis)
    action = {}
    for (l, al), out in m.action.items():
        action[(("M", l), al)] = {("M", r): c for r, c in out.items()}
    for (l, al), out in n.action.items():
        action[(("N", l), al)] = {("N", r): c for r, c in out.items()}
    diff = {}
    minus = ring.coerce(-1)
    for l in m.gm.labels:
        out = {("M", r): ring.mul(minus, c) for r, c in m.diff.get(l, {}).items()}
        for r, c in f.get(l, {}).items():
            out[("N", r)] = ring.add(out.get(("N", r), ring.zero()), c)
        out = {k: v for k, v in out.items() if v != 0}
        if out:
            diff[("M", l)] = out
    for l in n.gm.labels:
        if l in n.diff:
            diff[("N", l)] = {("N", r): c for r, c in n.diff[l].items()}
    return DgModule(gm, m.algebra, action, diff, name=name or "cone")


# ---------------------------------------------------------------------------
# Hom complexes
# ---------------------------------------------------------------------------


class HomComplex:
    """The complex of right-module homomorphisms Hom_A(M, N) over k.

    Basis maps are found by solving the A-linearity constraints degreewise;
    the differential is d(f) = d_N o f - (-1)^{|f|} f o d_M, and
    :meth:`compose` is the chain-level pairing.
    """

    def __init__(self, m: DgModule, n: DgModule):
        if m.algebra is not n.algebra:
            raise DgError("Hom of modules over different algebras")
        self.m = m
        self.n = n
        self.ring = m.ring
        self._basis = {}  # degree -> list of maps (dict mlabel -> dict nlabel -> c)
        self._compute_bases()

    def _hom_degrees(self):
        mdegs = self.m.gm.degrees()
        ndegs = self.n.gm.degrees()
        if not mdegs or not ndegs:
            return []
        lo = min(ndegs) - max(mdegs)
        hi = max(ndegs) - min(mdegs)
        return range(lo, hi + 1)

    def _pairs_of_degree(self, k):
        out = []
        for ml in self.m.gm.labels:
            for nl in self.n.gm.labels:
                if self.n.gm.degree[nl] - self.m.gm.degree[ml] == k:
                    out.append((ml, nl))
        return out

    def _compute_bases(self):
        ring = self.ring
        for k in self._hom_degrees():
            pairs = self._pairs_of_degree(k)
            if not pairs:
                continue
            index = {p: i for i, p in enumerate(pairs)}
            # linearity f(m . a) = f(m) . a: for each (ml, al) and target t,
            # sum_r act_M[ml,al][r] f[r,t] - sum_s f[ml,s] act_N[s,al][t] = 0
            eqs = []
            for ml in self.m.gm.labels:
                for al in self.m.algebra.gm.labels:
                    lhs_coeffs = self.m.act({ml: ring.one()}, {al: ring.one()})
                    for t in self.n.gm.labels:
                        row = {}
                        for r, c in lhs_coeffs.items():
                            if (r, t) in index:
                                j = index[(r, t)]
                                row[j] = ring.add(row.get(j, ring.zero()), c)
                        for s in self.n.gm.labels:
                            if (ml, s) not in index:
                                continue
                            c2 = self.n.act({s: ring.one()}, {al: ring.one()}).get(t)
                            if c2 is not None:
                                j = index[(ml, s)]
                                row[j] = ring.sub(row.get(j, ring.zero()), c2)
                        if row:
                            eqs.append(row)
            mat = ExactMatrix.zeros(ring, len(eqs), len(pairs))
            for i, row in enumerate(eqs):
                for j, c in row.items():
                    mat.set_entry(i, j, c)
            from .exactlinalg import kernel_basis
            basis = []
            for vec in kernel_basis(mat):
                f = {}
                for (ml, nl), j in index.items():
                    if vec[j] != 0:
                        f.setdefault(ml, {})[nl] = vec[j]
                basis.append(f)
            if basis:
                self._basis[k] = basis

    def basis(self, degree: int):
        return list(self._basis.get(degree, []))

    def degrees(self):
        return sorted(self._basis)

    def apply_d(self, f: dict, degree: int) -> dict:
        """d(f) = d_N o f - (-1)^{|f|} f o d_M as a raw map."""
        ring = self.ring
        out = {}
        for ml, img in f.items():
            out[ml] = self.n.d_dict(img)
        sign = ring.coerce((-1) ** degree)
        for ml in self.m.gm.labels:
            acc = out.get(ml, {})
            for r, c in self.m.diff.get(ml, {}).items():
                acc = vec_sub(ring, acc, vec_scale(ring, ring.mul(sign, c), f.get(r, {})))
            if acc:
                out[ml] = acc
            else:
                out.pop(ml, None)
        return {k: v for k, v in out.items() if v}

    def compose(self, g: dict, f: dict) -> dict:
        """(g o f)(m) = g(f(m)); a chain-level pairing Hom(N,P) x Hom(M,N)."""
        ring = self.ring
        out = {}
        for ml, img in f.items():
            acc = {}
            for nl, c in img.items():
                acc = vec_add(ring, acc, vec_scale(ring, c, g.get(nl, {})))
            if acc:
                out[ml] = acc
        return out

    def as_dgmodule(self, name: str = "") -> DgModule:
        """Package the Hom complex as a dg module over the ground ring."""
        ring = self.ring
        ground = ground_dga(ring)
        basis = []
        for k in self.degrees():
            for i, _ in enumerate(self._basis[k]):
                basis.append((("hom", k, i), k))
        gm = GradedModule(ring, basis)
        action = {(l, "1"): {l: ring.one()} for l, _ in basis}
        diff = {}
        for k in self.degrees():
            targets = self._basis.get(k + 1, [])
            if not targets:
                continue
            for i, f in enumerate(self._basis[k]):
                df = self.apply_d(f, k)
                coords = self._coords(df, k + 1)
                out = {("hom", k + 1, j): c for j, c in coords.items() if c != 0}
                if out:
                    diff[("hom", k, i)] = out
        return DgModule(gm, ground, action, diff, name=name or "Hom complex")

    def _coords(self, f: dict, degree: int) -> dict:
        """Coordinates of a raw map in the computed degree basis."""
        ring = self.ring
        basis = self._basis.get(degree, [])
        pairs = self._pairs_of_degree(degree)
        index = {p: i for i, p in enumerate(pairs)}
        mat = ExactMatrix.zeros(ring, len(pairs), len(basis))
        for j, b in enumerate(basis):
            for ml, img in b.items():
                for nl, c in img.items():
                    mat.set_entry(index[(ml, nl)], j, c)
        target = [ring.zero()] * len(pairs)
        for ml, img in f.items():
            for nl, c in img.items():
                target[index[(ml, nl)]] = c
        sol = solve_linear(mat, target)
        if sol is None:
            raise DgError("map does not lie in the computed Hom space")
        return {j: c for j, c in enumerate(sol[0]) if c != 0}


# ---------------------------------------------------------------------------
# free hull G(L)
# ---------------------------------------------------------------------------


def free_hull(a: DgAlgebra, generators, name: str = "") -> DgModule:
    """The free hull G(L) of the free graded A^#-module L on ``generators``.

    G(L) consists of formal symbols x + dy for x, y in L, with action
    (x + dy) a = x a + d(y a) - (-1)^{|y|} y da and differential
    d(x + dy) = dx.  Its underlying graded module is L (+) L[-1]; the unit
    map L -> G(L) is the inclusion of the x-part.
    """
    ring = a.ring
    gens = list(generators)
    basis = []
    for g, gd in gens:
        for al in a.gm.labels:
            d = gd + a.gm.degree[al]
            basis.append((("x", g, al), d))
            basis.append((("dx", g, al), d + 1))
    gm = GradedModule(ring, basis)
    action = {}
    for g, gd in gens:
        for al in a.gm.labels:
            ydeg = gd + a.gm.degree[al]
            for bl in a.gm.labels:
                prod = a.mul_labels(al, bl)
                out_x = {("x", g, r): c for r, c in prod.items()}
                if out_x:
                    action[(("x", g, al), bl)] = out_x
                # (d y) b = d(y b) - (-1)^{|y|} y db
                out = {("dx", g, r): c for r, c in prod.items()}
                sign = ring.coerce(-((-1) ** ydeg))
                for r, c in a.mul_dicts({al: ring.one()}, a.diff.get(bl, {})).items():
                    key = ("x", g, r)
                    out[key] = ring.add(out.get(key, ring.zero()), ring.mul(sign, c))
                out = {k: v for k, v in out.items() if v != 0}
                if out:
                    action[(("dx", g, al), bl)] = out
    diff = {("x", g, al): {("dx", g, al): ring.one()}
            for g, _ in gens for al in a.gm.labels}
    return DgModule(gm, a, action, diff, name=name or "G(L)")
