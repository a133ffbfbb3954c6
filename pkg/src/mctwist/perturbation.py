"""Reduced and minimal twisted modules, perturbation and resolution lifts.

A twisted module (V (x) A, 1 (x) d + x) is *reduced* when the A^0-part of
the twisting is d0 (x) 1 for a differential d0 on V, and *minimal* when
d0 = 0.  Over a field, an abstract Hodge decomposition (s, t) of (V, d0)
feeds the homological perturbation lemma: the weight-raising part d' of
the twisting transfers to the harmonic part H(V) with twisting

    t d' (1 + s d')^{-1} t,

and the geometric series terminates because d' raises the (bounded)
algebra-degree filtration.  All outputs -- the minimal twisting, the two
comparison maps and the homotopy -- are verified equationally and exactly.

Operators between twisted modules are stored as convolution matrices:
sparse dicts {(src label, dst label, algebra label): coefficient} meaning
sum E_{src -> dst} (x) a, composed with the Koszul sign
(-1)^{|a| |psi|} where psi is the matrix part of the right factor.
"""

from __future__ import annotations

from .dgcore import DgAlgebra, GradedModule, endomorphism_dga
from .exactlinalg import ExactMatrix, Ring, kernel_basis, solve_linear
from .mc import MCElement, TwistedModule


class PerturbationError(ValueError):
    pass


class ConvOp:
    """A map V_src (x) A -> V_dst (x) A given by convolution coefficients."""

    def __init__(self, algebra: DgAlgebra, src: GradedModule, dst: GradedModule,
                 coeffs: dict = None):
        self.algebra = algebra
        self.ring = algebra.ring
        self.src = src
        self.dst = dst
        self.coeffs = {}
        for (u, w, al), c in (coeffs or {}).items():
            c = self.ring.coerce(c)
            if c != 0:
                self.coeffs[(u, w, al)] = c

    @staticmethod
    def identity(algebra: DgAlgebra, v: GradedModule) -> "ConvOp":
        out = {}
        for u in v.labels:
            for al, c in algebra.unit.items():
                out[(u, u, al)] = c
        return ConvOp(algebra, v, v, out)

    @staticmethod
    def from_matrix(algebra: DgAlgebra, src: GradedModule, dst: GradedModule,
                    entries: dict) -> "ConvOp":
        """Weight-0 operator from {(src label, dst label): scalar} (x) unit."""
        out = {}
        for (u, w), c in entries.items():
            for al, cu in algebra.unit.items():
                out[(u, w, al)] = algebra.ring.mul(algebra.ring.coerce(c), cu)
        return ConvOp(algebra, src, dst, out)

    @staticmethod
    def from_mc(x: MCElement, algebra: DgAlgebra, v: GradedModule) -> "ConvOp":
        out = {}
        for (tag, u, w, al), c in x.value.coeffs.items():
            out[(u, w, al)] = c
        return ConvOp(algebra, v, v, out)

    def to_mc_coeffs(self) -> dict:
        return {("E", u, w, al): c for (u, w, al), c in self.coeffs.items()}

    def term_degree(self, key) -> int:
        u, w, al = key
        return self.dst.degree[w] - self.src.degree[u] + self.algebra.gm.degree[al]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "ConvOp") -> "ConvOp":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = self.ring.add(out.get(k, self.ring.zero()), c)
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return ConvOp(self.algebra, self.src, self.dst, out)

    def __sub__(self, other: "ConvOp") -> "ConvOp":
        return self + other.scale(-1)

    def scale(self, c) -> "ConvOp":
        c = self.ring.coerce(c)
        return ConvOp(self.algebra, self.src, self.dst,
                      {k: self.ring.mul(c, v) for k, v in self.coeffs.items()})

    def compose(self, other: "ConvOp") -> "ConvOp":
        """self o other, other acting first."""
        if other.dst is not self.src and other.dst.labels != self.src.labels:
            raise PerturbationError("composition endpoints do not match")
        ring = self.ring
        out = {}
        by_w0 = {}
        for (u0, w0, a0), c0 in other.coeffs.items():
            by_w0.setdefault(w0, []).append((u0, a0, c0))
        for (u1, w1, a1), c1 in self.coeffs.items():
            da1 = self.algebra.gm.degree[a1]
            for (u0, a0, c0) in by_w0.get(u1, ()):
                psi = other.dst.degree[u1] - other.src.degree[u0]
                sign = ring.coerce((-1) ** (da1 * psi))
                prod = self.algebra.mul_labels(a1, a0)
                if not prod:
                    continue
                c = ring.mul(ring.mul(c1, c0), sign)
                for r, cr in prod.items():
                    key = (u0, w1, r)
                    s = ring.add(out.get(key, ring.zero()), ring.mul(c, cr))
                    if s == 0:
                        out.pop(key, None)
                    else:
                        out[key] = s
        return ConvOp(self.algebra, other.src, self.dst, out)

    def d_end(self) -> "ConvOp":
        """(1 (x) d) with the Koszul sign on the matrix part."""
        ring = self.ring
        out = {}
        for (u, w, al), c in self.coeffs.items():
            sign = ring.coerce((-1) ** (self.dst.degree[w] - self.src.degree[u]))
            for r, cr in self.algebra.diff.get(al, {}).items():
                key = (u, w, r)
                s = ring.add(out.get(key, ring.zero()),
                             ring.mul(ring.mul(sign, c), cr))
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = s
        return ConvOp(self.algebra, self.src, self.dst, out)

    def weight_split(self) -> dict:
        """Components by algebra degree (the filtration weight)."""
        parts = {}
        for key, c in self.coeffs.items():
            w = self.algebra.gm.degree[key[2]]
            parts.setdefault(w, {})[key] = c
        return {w: ConvOp(self.algebra, self.src, self.dst, d)
                for w, d in parts.items()}

    def min_weight(self):
        return min((self.algebra.gm.degree[k[2]] for k in self.coeffs), default=None)

    def __eq__(self, other):
        return isinstance(other, ConvOp) and self.coeffs == other.coeffs

    def __repr__(self):
        return "ConvOp(%d terms)" % len(self.coeffs)


def hom_differential(f: ConvOp, x_src: ConvOp, x_dst: ConvOp, degree: int) -> ConvOp:
    """d(f) = (1 (x) d)(f) + x_dst o f - (-1)^{|f|} f o x_src."""
    out = f.d_end() + x_dst.compose(f)
    return out - f.compose(x_src).scale((-1) ** degree)


def geometric_inverse(one: ConvOp, n: ConvOp, bound: int) -> ConvOp:
    """(1 + n)^{-1} = sum (-n)^k for a weight-raising nilpotent n."""
    mw = n.min_weight()
    if not n.is_zero() and (mw is None or mw < 1):
        raise PerturbationError("series term does not raise the filtration")
    acc = one
    power = one
    for _ in range(bound + 1):
        power = power.compose(n).scale(-1)
        if power.is_zero():
            break
        acc = acc + power
    else:
        if not power.is_zero():
            raise PerturbationError("geometric series failed to terminate")
    return acc


# ---------------------------------------------------------------------------
# reduced and minimal twisted modules
# ---------------------------------------------------------------------------


class ReducedTwistedModule:
    """A twisted module whose A^0 twisting component is d0 (x) unit."""

    def __init__(self, tw: TwistedModule, d0_entries: dict):
        self.tw = tw
        self.algebra = tw.algebra
        self.v = tw.v
        self.ring = tw.algebra.ring
        self.d0 = dict(d0_entries)
        x = ConvOp.from_mc(tw.mc, tw.algebra, tw.v)
        want = ConvOp.from_matrix(tw.algebra, tw.v, tw.v, self.d0)
        parts = x.weight_split()
        zero_part = parts.get(0, ConvOp(tw.algebra, tw.v, tw.v))
        if zero_part != want:
            raise PerturbationError("A^0 component of the twisting is not d0 (x) 1")
        sq = want.compose(want)
        if not sq.is_zero():
            raise PerturbationError("d0 does not square to zero")

    @property
    def d_prime(self) -> ConvOp:
        x = ConvOp.from_mc(self.tw.mc, self.algebra, self.v)
        parts = x.weight_split()
        acc = ConvOp(self.algebra, self.v, self.v)
        for w, op in parts.items():
            if w >= 1:
                acc = acc + op
        return acc


def reduced_component(tw: TwistedModule):
    """Extract d0 entries when the weight-0 twisting is induced from V.

    Returns the entry dict or None when the module is not reduced.
    """
    ring = tw.algebra.ring
    x = ConvOp.from_mc(tw.mc, tw.algebra, tw.v)
    zero_part = x.weight_split().get(0)
    if zero_part is None:
        return {}
    unit = tw.algebra.unit
    entries = {}
    # the weight-0 part must equal sum_{(u,w)} c_{uw} E_{u->w} (x) unit
    al0, cu0 = next(iter(sorted(unit.items(), key=str)))
    seen_pairs = {(u, w) for (u, w, al) in zero_part.coeffs}
    for (u, w) in seen_pairs:
        c = zero_part.coeffs.get((u, w, al0), ring.zero())
        if cu0 != ring.one():
            try:
                c = ring.div(c, cu0)
            except Exception:
                return None
        if c != 0:
            entries[(u, w)] = c
    probe = ConvOp.from_matrix(tw.algebra, tw.v, tw.v, entries)
    if probe != zero_part:
        return None
    return entries


def is_reduced(tw: TwistedModule) -> bool:
    return reduced_component(tw) is not None


def is_minimal(tw: TwistedModule) -> bool:
    return ConvOp.from_mc(tw.mc, tw.algebra, tw.v).weight_split().get(0) is None


# ---------------------------------------------------------------------------
# abstract Hodge decompositions
# ---------------------------------------------------------------------------


class HodgeData:
    """Operators (s, t) with d0 s + s d0 = 1 - t, t^2 = t, st = ts = 0, s^2 = 0."""

    def __init__(self, s_entries: dict, t_entries: dict, harmonic_basis: list):
        self.s = dict(s_entries)
        self.t = dict(t_entries)
        self.harmonic_basis = harmonic_basis  # list of (new label, vector over V)


def hodge_data(v: GradedModule, d0_entries: dict) -> HodgeData:
    """Split (V, d0) over a field into harmonic, exact and coexact parts.

    Working degree by degree, Gaussian elimination chooses
    ker d0 = H (+) im d0 and a complement U with d0: U ~ im d0; s inverts
    d0 on the image and kills H (+) U, t is the projection onto H.
    """
    ring = v.ring
    if not ring.is_field:
        raise PerturbationError("Hodge decompositions need field coefficients")
    labels = list(v.labels)
    ix = {l: i for i, l in enumerate(labels)}
    n = len(labels)
    d0 = ExactMatrix.zeros(ring, n, n)
    for (u, w), c in d0_entries.items():
        d0.set_entry(ix[w], ix[u], ring.coerce(c))

    def block(deg):
        src = list(v.labels_of_degree(deg))
        dst = list(v.labels_of_degree(deg + 1))
        m = ExactMatrix(ring, len(dst), len(src),
                        [[d0.get(ix[w], ix[u]) for u in src] for w in dst])
        return m, src, dst

    s_mat = {}
    t_mat = {}
    harmonic_basis = []
    for deg in v.degrees():
        bmat, src, dst = block(deg)
        prev, psrc, pdst = block(deg - 1)
        assert pdst == src
        nloc = len(src)
        # image of the previous block, with chosen preimages
        im_vectors = []
        pre = []
        cur = []
        for j in range(prev.cols):
            col = [prev.get(i, j) for i in range(prev.rows)]
            if any(c != 0 for c in col) and _rank_cols(ring, cur + [col], nloc) > len(cur):
                cur = cur + [col]
                im_vectors.append(col)
                pre.append(psrc[j])
        ker = kernel_basis(bmat)
        harmonic = []
        span = list(im_vectors)
        for vec in ker:
            if _rank_cols(ring, span + [list(vec)], nloc) > len(span):
                span = span + [list(vec)]
                harmonic.append(list(vec))
        # complement U of the kernel
        basis_cols = [list(h) for h in harmonic] + [list(c) for c in im_vectors]
        complement = []
        span = list(basis_cols)
        for j in range(nloc):
            e = [ring.one() if i == j else ring.zero() for i in range(nloc)]
            if _rank_cols(ring, span + [e], nloc) > len(span):
                span = span + [e]
                complement.append(e)
        full = basis_cols + complement
        if nloc:
            mat = ExactMatrix(ring, nloc, nloc,
                              [[full[c][r] for c in range(nloc)] for r in range(nloc)])
        nh, ni = len(harmonic), len(im_vectors)
        for j, l in enumerate(src):
            e = [ring.one() if i == j else ring.zero() for i in range(nloc)]
            coords = solve_linear(mat, e)[0]
            for k in range(nh):
                if coords[k] != 0:
                    for i in range(nloc):
                        c = ring.mul(coords[k], harmonic[k][i])
                        if c != 0:
                            key = (l, src[i])
                            t_mat[key] = ring.add(t_mat.get(key, ring.zero()), c)
            for k in range(ni):
                if coords[nh + k] != 0:
                    key = (l, pre[k])
                    s_mat[key] = ring.add(s_mat.get(key, ring.zero()), coords[nh + k])
        for k, vec in enumerate(harmonic):
            full_vec = [ring.zero()] * n
            for i, c in enumerate(vec):
                full_vec[ix[src[i]]] = c
            harmonic_basis.append((("h", deg, k), full_vec))
    t_mat = {k: v2 for k, v2 in t_mat.items() if v2 != 0}
    s_mat = {k: v2 for k, v2 in s_mat.items() if v2 != 0}
    return HodgeData(s_mat, t_mat, harmonic_basis)


def _rank_cols(ring: Ring, cols, height: int) -> int:
    from .exactlinalg import rank
    if not cols:
        return 0
    m = ExactMatrix(ring, height, len(cols),
                    [[cols[c][r] for c in range(len(cols))] for r in range(height)])
    return rank(m)


def check_hodge(v: GradedModule, d0_entries: dict, h: HodgeData) -> bool:
    a = _trivial_dga(v.ring)
    gm = v
    d0 = ConvOp.from_matrix(a, gm, gm, d0_entries)
    s = ConvOp.from_matrix(a, gm, gm, h.s)
    t = ConvOp.from_matrix(a, gm, gm, h.t)
    one = ConvOp.identity(a, gm)
    return (d0.compose(s) + s.compose(d0) == one - t
            and t.compose(t) == t
            and s.compose(t).is_zero() and t.compose(s).is_zero()
            and s.compose(s).is_zero())


def _trivial_dga(ring: Ring) -> DgAlgebra:
    from .dgcore import ground_dga
    return ground_dga(ring)


# ---------------------------------------------------------------------------
# the perturbation lemma
# ---------------------------------------------------------------------------


class MinimalModel:
    def __init__(self, minimal: TwistedModule, include: ConvOp, project: ConvOp,
                 homotopy: ConvOp, hodge: HodgeData):
        self.minimal = minimal
        self.include = include
        self.project = project
        self.homotopy = homotopy
        self.hodge = hodge


def minimal_model(rtm: ReducedTwistedModule, hodge: HodgeData = None) -> MinimalModel:
    """Transfer a reduced twisted module to a minimal one over a field.

    Every postcondition is verified exactly before returning: the output
    twisting is MC with no weight-0 part, the comparison maps are closed,
    p o i = 1, and 1 - i o p is the Hom-differential of the homotopy.
    """
    a = rtm.algebra
    ring = a.ring
    if not ring.is_field:
        raise PerturbationError("minimal models are computed over fields")
    v = rtm.v
    h = hodge if hodge is not None else hodge_data(v, rtm.d0)
    if not check_hodge(v, rtm.d0, h):
        raise PerturbationError("Hodge data fails its identities")
    hg = GradedModule(ring, [(lbl, _vector_degree(v, vec))
                             for lbl, vec in h.harmonic_basis])
    # inclusion/projection between H(V) and V as weight-0 operators
    inc_entries = {}
    for lbl, vec in h.harmonic_basis:
        for i, c in enumerate(vec):
            if c != 0:
                inc_entries[(lbl, v.labels[i])] = c
    i_h = ConvOp.from_matrix(a, hg, v, inc_entries)
    proj_entries = _projection_entries(ring, v, hg, h)
    p_h = ConvOp.from_matrix(a, v, hg, proj_entries)

    s_op = ConvOp.from_matrix(a, v, v, h.s)
    t_op = ConvOp.from_matrix(a, v, v, h.t)
    one_v = ConvOp.identity(a, v)
    one_h = ConvOp.identity(a, hg)
    d_prime = rtm.d_prime
    bound = len(a.gm.degrees()) + 2

    p_series = geometric_inverse(one_v, s_op.compose(d_prime), bound)   # (1 + s d')^{-1}
    q_series = geometric_inverse(one_v, d_prime.compose(s_op), bound)   # (1 + d' s)^{-1}

    sigma = d_prime.compose(p_series)              # d'(1 + s d')^{-1}
    x2 = p_h.compose(t_op.compose(sigma).compose(t_op)).compose(i_h)
    include = p_series.compose(t_op).compose(i_h)
    project = p_h.compose(t_op).compose(q_series)
    homotopy = p_series.compose(s_op)

    end_h = endomorphism_dga(a, hg)
    x2_mc = MCElement(end_h, end_h.element(x2.to_mc_coeffs()))
    minimal = TwistedModule(hg, a, x2_mc, end_dga=end_h, name="minimal model")

    x_op = ConvOp.from_mc(rtm.tw.mc, a, v)
    checks = {
        "minimal": is_minimal(minimal),
        "include_closed": hom_differential(include, x2, x_op, 0).is_zero(),
        "project_closed": hom_differential(project, x_op, x2, 0).is_zero(),
        "p_i_identity": project.compose(include) == one_h,
        "homotopy": (one_v - include.compose(project)
                     - hom_differential(homotopy, x_op, x_op, -1)).is_zero(),
    }
    if not all(checks.values()):
        raise PerturbationError("perturbation output failed verification: %r"
                                % ({k: v for k, v in checks.items() if not v},))
    return MinimalModel(minimal, include, project, homotopy, h)


def _vector_degree(v: GradedModule, vec) -> int:
    degs = {v.degree[v.labels[i]] for i, c in enumerate(vec) if c != 0}
    if len(degs) != 1:
        raise PerturbationError("harmonic vector is not homogeneous")
    return degs.pop()


def _projection_entries(ring, v: GradedModule, hg: GradedModule, h: HodgeData) -> dict:
    # p = coordinates on the harmonic part: p(e_j) = coefficients of t(e_j)
    # in the harmonic basis
    labels = list(v.labels)
    n = len(labels)
    hb = [vec for _, vec in h.harmonic_basis]
    if not hb:
        return {}
    mat = ExactMatrix(ring, n, len(hb),
                      [[hb[c][r] for c in range(len(hb))] for r in range(n)])
    out = {}
    for j, l in enumerate(labels):
        tvec = [ring.zero()] * n
        for (src, dst), c in h.t.items():
            if src == l:
                tvec[labels.index(dst)] = c
        sol = solve_linear(mat, tvec)
        if sol is None:
            raise PerturbationError("projection does not land in the harmonic part")
        for k, c in enumerate(sol[0]):
            if c != 0:
                out[(l, hg.labels[k])] = c
    return out


# ---------------------------------------------------------------------------
# rigidity: invertibility of closed maps between minimal modules
# ---------------------------------------------------------------------------


def minimal_iso_check(f: ConvOp, src: TwistedModule, dst: TwistedModule):
    """Decide strict invertibility of a closed degree-0 map of minimal modules.

    By minimality the weight filtration is exhaustive: f is invertible iff
    its weight-0 block is, and then the inverse is the terminating series
    (1 + n)^{-1} g0 with n = g0 (f - f0) of positive weight.  Returns
    (True, inverse) or (False, None); the inverse is verified two-sided.
    """
    if not (is_minimal(src) and is_minimal(dst)):
        raise PerturbationError("rigidity check needs minimal modules")
    a = src.algebra
    x_src = ConvOp.from_mc(src.mc, a, src.v)
    x_dst = ConvOp.from_mc(dst.mc, a, dst.v)
    if not hom_differential(f, x_src, x_dst, 0).is_zero():
        raise PerturbationError("map is not closed of degree 0")
    f0 = f.weight_split().get(0, ConvOp(a, src.v, dst.v))
    g0 = _invert_weight_zero(a, f0, src.v, dst.v)
    if g0 is None:
        return False, None
    one_src = ConvOp.identity(a, src.v)
    n = g0.compose(f - f0)
    bound = len(a.gm.degrees()) + 2
    series = geometric_inverse(one_src, n, bound)
    inv = series.compose(g0)
    if inv.compose(f) == one_src and f.compose(inv) == ConvOp.identity(a, dst.v):
        return True, inv
    return False, None


def _invert_weight_zero(a: DgAlgebra, f0: ConvOp, vsrc: GradedModule, vdst: GradedModule):
    """Two-sided inverse of a weight-0 operator, by linear solve over A^0."""
    ring = a.ring
    deg0 = list(a.gm.labels_of_degree(0))
    unknowns = [(u, w, al) for u in vdst.labels for w in vsrc.labels for al in deg0]
    if len(vsrc.labels) != len(vdst.labels):
        return None
    uix = {k: i for i, k in enumerate(unknowns)}
    rows = {}
    rhs = {}

    def eq(side, key, col, c):
        if c == 0:
            return
        row = rows.setdefault((side, key), {})
        row[col] = ring.add(row.get(col, ring.zero()), c)

    one = ConvOp.identity(a, vsrc)
    one_d = ConvOp.identity(a, vdst)
    # f0 o g = 1_dst and g o f0 = 1_src, linear in g
    for (u, w, al) in unknowns:
        g_term = ConvOp(a, vdst, vsrc, {(u, w, al): ring.one()})
        fg = f0.compose(g_term)
        for key, c in fg.coeffs.items():
            eq("fg", key, uix[(u, w, al)], c)
        gf = g_term.compose(f0)
        for key, c in gf.coeffs.items():
            eq("gf", key, uix[(u, w, al)], c)
    for key, c in one_d.coeffs.items():
        rhs[("fg", key)] = c
    for key, c in one.coeffs.items():
        rhs[("gf", key)] = c
    eqkeys = sorted(set(rows) | set(rhs), key=str)
    mat = ExactMatrix.zeros(ring, len(eqkeys), len(unknowns))
    for i, k in enumerate(eqkeys):
        for j, c in rows.get(k, {}).items():
            mat.set_entry(i, j, c)
    target = [rhs.get(k, ring.zero()) for k in eqkeys]
    sol = solve_linear(mat, target)
    if sol is None:
        return None
    coeffs = {unknowns[i]: c for i, c in enumerate(sol[0]) if c != 0}
    return ConvOp(a, vdst, vsrc, coeffs)


# ---------------------------------------------------------------------------
# free resolution lifts over Z
# ---------------------------------------------------------------------------


def lift_to_free_resolution(a: DgAlgebra, w_gm: GradedModule, d_w_entries: dict,
                            w1: ConvOp) -> TwistedModule:
    """Extend d_W + w1 to a square-zero twisting of W (x) A over Z.

    ``w1`` must be a weight-1 chain map ([d_W, w1] = 0) lifting the local
    system's edge action.  The higher corrections w_k solve

        [d_W, w_k] = -((1 (x) d)(w_{k-1}) + sum_{i+j=k, i,j>=1} w_i w_j)

    degreewise by exact linear solve; an unsolvable stage k (a nonzero
    obstruction class in H^{1-k} End(W) = Ext^{1-k}(V, V)) is reported.
    The result is verified MC exactly.
    """
    ring = a.ring
    d_w = ConvOp.from_matrix(a, w_gm, w_gm, d_w_entries)
    if not d_w.compose(d_w).is_zero():
        raise PerturbationError("d_W does not square to zero")
    # graded commutator [d_W (x) 1, w1] for w1 of total degree 1 is the
    # anticommutator in convolution; the Koszul sign inside compose already
    # accounts for the tensor factors, so this is the chain-map condition.
    comm = d_w.compose(w1) + w1.compose(d_w)
    if not comm.is_zero():
        raise PerturbationError("w1 is not a chain map over d_W")
    ws = {0: d_w, 1: w1}
    top = max(a.gm.degrees())
    for k in range(2, top + 1 + 1):
        rest = ConvOp(a, w_gm, w_gm)
        rest = rest + ws[k - 1].d_end()
        for i in range(1, k):
            j = k - i
            if i in ws and j in ws:
                rest = rest + ws[i].compose(ws[j])
        if rest.is_zero():
            ws[k] = ConvOp(a, w_gm, w_gm)
            continue
        sol = _solve_commutator(a, w_gm, d_w, rest.scale(-1), weight=k)
        if sol is None:
            raise PerturbationError("obstruction class nonzero at stage %d" % k)
        ws[k] = sol
    x_total = ConvOp(a, w_gm, w_gm)
    for k, op in ws.items():
        x_total = x_total + op
    end = endomorphism_dga(a, w_gm)
    mc = MCElement(end, end.element(x_total.to_mc_coeffs()))
    return TwistedModule(w_gm, a, mc, end_dga=end, name="resolution lift")


def _solve_commutator(a: DgAlgebra, w_gm: GradedModule, d_w: ConvOp,
                      target: ConvOp, weight: int):
    """Solve [d_W, w] = target for w of algebra weight ``weight``, degree 1."""
    ring = a.ring
    unknown_keys = []
    for u in w_gm.labels:
        for w in w_gm.labels:
            for al in a.gm.labels:
                if a.gm.degree[al] != weight:
                    continue
                if w_gm.degree[w] - w_gm.degree[u] + weight == 1:
                    unknown_keys.append((u, w, al))
    if not unknown_keys:
        return None if not target.is_zero() else ConvOp(a, w_gm, w_gm)
    uix = {k: i for i, k in enumerate(unknown_keys)}
    rows = {}
    for key in unknown_keys:
        probe = ConvOp(a, w_gm, w_gm, {key: ring.one()})
        # [d_W, probe] with probe of total degree 1: d_W probe + probe d_W
        br = d_w.compose(probe) + probe.compose(d_w)
        for rkey, c in br.coeffs.items():
            rows.setdefault(rkey, {})[uix[key]] = ring.add(
                rows.get(rkey, {}).get(uix[key], ring.zero()), c)
    eqkeys = sorted(set(rows) | set(target.coeffs), key=str)
    mat = ExactMatrix.zeros(ring, len(eqkeys), len(unknown_keys))
    for i, k in enumerate(eqkeys):
        for j, c in rows.get(k, {}).items():
            mat.set_entry(i, j, c)
    tvec = [target.coeffs.get(k, ring.zero()) for k in eqkeys]
    sol = solve_linear(mat, tvec)
    if sol is None:
        return None
    return ConvOp(a, w_gm, w_gm,
                  {unknown_keys[i]: c for i, c in enumerate(sol[0]) if c != 0})


# ---------------------------------------------------------------------------
# canonical truncation
# ---------------------------------------------------------------------------


def truncate_twisted(rtm: ReducedTwistedModule, i: int):
    """tau_{<= i}: kernel truncation of (V, d0), with the inclusion map.

    Over the exact rings here (fields and the PID Z) the kernel is a free
    summand-basis, so the truncated twisted module exists directly; the
    restricted twisting is expressed in the kernel basis by exact solves.
    Returns (TwistedModule, inclusion ConvOp).
    """
    a = rtm.algebra
    ring = a.ring
    v = rtm.v
    degrees = sorted({v.degree[l] for l in v.labels})
    labels = list(v.labels)
    ix = {l: k for k, l in enumerate(labels)}
    n = len(labels)
    d0 = ExactMatrix.zeros(ring, n, n)
    for (u, w), c in rtm.d0.items():
        d0.set_entry(ix[w], ix[u], ring.coerce(c))
    new_vectors = []  # (label, degree, vector over V)
    for deg in degrees:
        if deg < i:
            for l in v.labels_of_degree(deg):
                vec = [ring.zero()] * n
                vec[ix[l]] = ring.one()
                new_vectors.append((("t", l), deg, vec))
        elif deg == i:
            cols = list(v.labels_of_degree(deg))
            if not cols:
                continue
            sub = ExactMatrix(ring, n, len(cols),
                              [[d0.get(r, ix[c]) for c in cols] for r in range(n)])
            for k, kv in enumerate(kernel_basis(sub)):
                vec = [ring.zero()] * n
                for ci, c in enumerate(kv):
                    vec[ix[cols[ci]]] = c
                new_vectors.append((("ker", i, k), deg, vec))
    if not new_vectors:
        vgm = GradedModule(ring, [])
        end = endomorphism_dga(a, vgm)
        from .mc import zero_mc
        return TwistedModule(vgm, a, zero_mc(end), end_dga=end,
                             name="tau_<=%d (zero)" % i), ConvOp(a, vgm, v)
    vgm = GradedModule(ring, [(lbl, deg) for lbl, deg, _ in new_vectors])
    inc_entries = {}
    for lbl, _, vec in new_vectors:
        for k, c in enumerate(vec):
            if c != 0:
                inc_entries[(lbl, labels[k])] = c
    inc = ConvOp.from_matrix(a, vgm, v, inc_entries)
    # restricted twisting: solve x o inc = inc o x' for x'
    x = ConvOp.from_mc(rtm.tw.mc, a, v)
    ximg = x.compose(inc)
    basis_mat = ExactMatrix(ring, n, len(new_vectors),
                            [[new_vectors[c][2][r] for c in range(len(new_vectors))]
                             for r in range(n)])
    xprime = {}
    # group image terms by (source new label, algebra label) and solve
    grouped = {}
    for (u, w, al), c in ximg.coeffs.items():
        grouped.setdefault((u, al), {})[w] = c
    for (u, al), img in grouped.items():
        tvec = [img.get(l, ring.zero()) for l in labels]
        sol = solve_linear(basis_mat, tvec)
        if sol is None:
            raise PerturbationError("twisting does not preserve the truncation")
        for k, c in enumerate(sol[0]):
            if c != 0:
                xprime[(u, new_vectors[k][0], al)] = c
    end = endomorphism_dga(a, vgm)
    mc = MCElement(end, end.element(
        {("E", u, w, al): c for (u, w, al), c in xprime.items()}))
    out = TwistedModule(vgm, a, mc, end_dga=end, name="tau_<=%d" % i)
    x_out = ConvOp.from_mc(mc, a, vgm)
    if not hom_differential(inc, x_out, x, 0).is_zero():
        raise PerturbationError("internal: truncation inclusion is not closed")
    return out, inc


def truncate_above(rtm: ReducedTwistedModule, i: int):
    """tau_{>= i}: the cone of the inclusion tau_{<= i-1} M -> M.

    Returned as a twisted module on V'[1] (+) V whose twisting carries the
    inclusion in the off-diagonal block; verified MC at construction.
    """
    a = rtm.algebra
    ring = a.ring
    low, inc = truncate_twisted(rtm, i - 1)
    basis = [(("C", l), d - 1) for l, d in low.v.basis()]
    basis += [(("M", l), d) for l, d in rtm.v.basis()]
    gm = GradedModule(ring, basis)
    coeffs = {}
    for (u, w, al), c in ConvOp.from_mc(low.mc, a, low.v).coeffs.items():
        coeffs[("E", ("C", u), ("C", w), al)] = ring.neg(c)
    for (u, w, al), c in ConvOp.from_mc(rtm.tw.mc, a, rtm.v).coeffs.items():
        coeffs[("E", ("M", u), ("M", w), al)] = c
    for (u, w, al), c in inc.coeffs.items():
        coeffs[("E", ("C", u), ("M", w), al)] = c
    end = endomorphism_dga(a, gm)
    mc = MCElement(end, end.element(coeffs))
    return TwistedModule(gm, a, mc, end_dga=end, name="tau_>=%d" % i)
