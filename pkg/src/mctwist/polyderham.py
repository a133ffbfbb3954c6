"""The polynomial de Rham algebra of the line and exact degreewise solves.

Every degree-1 element of k[z, dz] is a polynomial 1-form x = p(z) dz and
is Maurer-Cartan (dz^2 = 0 kills both d(x) and x^2).  A degree-0 morphism
between the twisted modules of two such elements x, y is a (matrix)
polynomial f with

    f'(z) + y(z) f(z) - f(z) x(z) = 0.

No finite-dimensional dg quotient of k[z, dz] can decide solvability: the
quotient by the d-stable ideal (z^{N+1}) loses the top-weight equation and
manufactures a spurious rank-one kernel (a truncated exponential).  The
honest computation is the banded linear system below, solved exactly for
polynomial f of weight <= cap with *all* equations retained; when the
leading band is injective the answer is certified complete for all weights,
which covers the classical "df + fx + yf = 0 has no polynomial solutions"
computations exactly.

The quotient dg algebra itself is still provided (it passes the axiom
checker and houses MC elements); only Hom-solvability questions must go
through the degreewise solver.
"""

from __future__ import annotations

from .dgcore import DgAlgebra, DgError, GradedModule
from .exactlinalg import ExactMatrix, Ring, kernel_basis


def polynomial_de_rham_dga(ring: Ring, max_z: int, name: str = "") -> DgAlgebra:
    """k[z, dz]/(z^{max_z+1}) as a dg algebra (char 0 coefficients).

    Basis z^0..z^max_z in degree 0 and dz, z dz, ..., z^{max_z-1} dz in
    degree 1 (the d-closure of the ideal eats z^{max_z} dz).
    """
    if ring.kind == "Fp":
        raise DgError("the polynomial de Rham fixture needs characteristic zero")
    basis = [(("z", k), 0) for k in range(max_z + 1)]
    basis += [(("zdz", k), 1) for k in range(max_z)]
    gm = GradedModule(ring, basis)
    unit = {("z", 0): 1}
    mult = {}
    for i in range(max_z + 1):
        for j in range(max_z + 1):
            if i + j <= max_z:
                mult[(("z", i), ("z", j))] = {("z", i + j): 1}
    for i in range(max_z + 1):
        for j in range(max_z):
            if i + j < max_z:
                mult[(("z", i), ("zdz", j))] = {("zdz", i + j): 1}
                mult[(("zdz", j), ("z", i))] = {("zdz", i + j): 1}
    diff = {("z", k): {("zdz", k - 1): k} for k in range(1, max_z + 1)}
    filtration = {("z", k): k for k in range(max_z + 1)}
    filtration.update({("zdz", k): k + 1 for k in range(max_z)})
    return DgAlgebra(gm, unit, mult, diff, filtration=filtration,
                     name=name or "Q[z,dz]/(z^%d)" % (max_z + 1))


def one_form(a: DgAlgebra, coeffs) -> dict:
    """The element sum_k c_k z^k dz of the quotient dg algebra."""
    out = {}
    for k, c in enumerate(coeffs):
        if c:
            out[("zdz", k)] = c
    return out


class MatrixPoly:
    """A matrix-valued polynomial sum_k M_k z^k over an exact ring."""

    def __init__(self, ring: Ring, n: int, coeffs=None):
        self.ring = ring
        self.n = n
        self.coeffs = {}
        for k, m in (coeffs or {}).items():
            if isinstance(m, list):
                m = ExactMatrix.from_rows(ring, m)
            if not m.is_zero():
                self.coeffs[k] = m

    @staticmethod
    def scalar(ring: Ring, poly_coeffs) -> "MatrixPoly":
        return MatrixPoly(ring, 1, {k: ExactMatrix.from_rows(ring, [[c]])
                                    for k, c in enumerate(poly_coeffs) if c})

    def degree(self):
        return max(self.coeffs, default=-1)

    def coeff(self, k) -> ExactMatrix:
        return self.coeffs.get(k, ExactMatrix.zeros(self.ring, self.n, self.n))


def hom_solutions(x: MatrixPoly, y: MatrixPoly, cap: int):
    """Exact polynomial solutions of f' + y f - f x = 0 with weight <= cap.

    x and y are the dz-coefficients of two MC 1-forms (matrix polynomials
    of matching size).  Returns (basis, certified) where basis is a list of
    solutions (each a list of cap+1 matrices) and ``certified`` is True
    when the leading-band analysis proves there are no further polynomial
    solutions of any weight, making the answer complete, not just
    cap-bounded.
    """
    if x.n != y.n or x.ring != y.ring:
        raise DgError("mismatched sizes or rings")
    ring = x.ring
    n = x.n
    d = max(x.degree(), y.degree(), 0)
    n_unknowns = n * n * (cap + 1)
    top_eq = cap + d + 1
    rows = []
    for m in range(top_eq + 1):
        for r in range(n):
            for c in range(n):
                rows.append((m, r, c))
    rix = {k: i for i, k in enumerate(rows)}
    mat = ExactMatrix.zeros(ring, len(rows), n_unknowns) if n_unknowns <= 512 \
        else ExactMatrix(ring, len(rows), n_unknowns)

    def uix(w, i, j):
        return (w * n + i) * n + j

    for w in range(cap + 1):
        # f' contributes w F_w at output weight w - 1
        if w >= 1:
            for i in range(n):
                for j in range(n):
                    key = (w - 1, i, j)
                    mat.set_entry(rix[key], uix(w, i, j),
                             ring.add(mat.get(rix[key], uix(w, i, j)), ring.coerce(w)))
        for k, ym in y.coeffs.items():
            m = w + k
            for i in range(n):
                for l in range(n):
                    c = ym.get(i, l)
                    if c == 0:
                        continue
                    for j in range(n):
                        key = (m, i, j)
                        mat.set_entry(rix[key], uix(w, l, j),
                                 ring.add(mat.get(rix[key], uix(w, l, j)), c))
        for k, xm in x.coeffs.items():
            m = w + k
            for l in range(n):
                for j in range(n):
                    c = xm.get(l, j)
                    if c == 0:
                        continue
                    for i in range(n):
                        key = (m, i, j)
                        mat.set_entry(rix[key], uix(w, i, l),
                                 ring.sub(mat.get(rix[key], uix(w, i, l)), c))
    basis = []
    for vec in kernel_basis(mat):
        sol = []
        for w in range(cap + 1):
            sol.append(ExactMatrix(ring, n, n,
                                   [[vec[uix(w, i, j)] for j in range(n)]
                                    for i in range(n)]))
        basis.append(sol)
    return basis, _leading_band_certificate(x, y, cap)


def _leading_band_certificate(x: MatrixPoly, y: MatrixPoly, cap: int) -> bool:
    """True when no polynomial solution can have weight above ``cap``.

    If x = y = 0 the leading band of the equation is w . F_w from f', which
    is injective for every w >= 1.  Otherwise the band at the top shift
    s = max(deg x, deg y) is the Sylvester map F -> Y_s F - F X_s, a
    w-independent linear map; its injectivity forces the top coefficient of
    any solution to vanish, hence there are no nonzero solutions at all.
    """
    ring = x.ring
    n = x.n
    if x.degree() < 0 and y.degree() < 0:
        return True  # only the f' band: w F_w = 0 forces F_w = 0 for w >= 1
    s = max(x.degree(), y.degree())
    ys = y.coeff(s)
    xs = x.coeff(s)
    syl = ExactMatrix.zeros(ring, n * n, n * n)
    for i in range(n):
        for j in range(n):
            col = i * n + j
            for r in range(n):
                c = ys.get(r, i)
                if c != 0:
                    syl.set_entry(r * n + j, col, ring.add(syl.get(r * n + j, col), c))
                c = xs.get(j, r)
                if c != 0:
                    syl.set_entry(i * n + r, col, ring.sub(syl.get(i * n + r, col), c))
    return len(kernel_basis(syl)) == 0


def hom_h0_dimension(x: MatrixPoly, y: MatrixPoly, cap: int):
    """(dimension of the polynomial solution space up to cap, certified)."""
    basis, certified = hom_solutions(x, y, cap)
    return len(basis), certified


def pairwise_h0_table(forms, cap: int):
    """Off-diagonal Hom solution dimensions for a list of scalar 1-forms."""
    out = {}
    for i, xi in enumerate(forms):
        for j, yj in enumerate(forms):
            dim, certified = hom_h0_dimension(xi, yj, cap)
            out[(i, j)] = {"dim": dim, "certified": certified}
    return out


def polynomial_mc_category(forms, cap: int):
    """H^0 summary for a list of MC 1-forms of matching size.

    Returns {"dims", "certified", "identity", "isomorphic"}: solution-space
    dimensions and completeness certificates per ordered pair, the identity
    class (the constant 1 is always a solution on the diagonal), and the
    pairs detected isomorphic by composing solutions back to a unit.
    """
    n = forms[0].n if forms else 1
    ring = forms[0].ring if forms else None
    dims = {}
    certified = {}
    sols = {}
    for i, x in enumerate(forms):
        for j, y in enumerate(forms):
            basis, cert = hom_solutions(x, y, cap)
            sols[(i, j)] = basis
            dims[(i, j)] = len(basis)
            certified[(i, j)] = cert
    isomorphic = []
    for i in range(len(forms)):
        for j in range(len(forms)):
            if i == j:
                continue
            # compose f in Hom(i, j) with g in Hom(j, i): polynomial product
            found = False
            for f in sols[(i, j)]:
                for g in sols[(j, i)]:
                    prod0 = g[0] * f[0]  # weight-0 part of g f
                    if solve_invertible(prod0):
                        found = True
            if found:
                isomorphic.append((i, j))
    return {"dims": dims, "certified": certified,
            "identity": "constants on the diagonal", "isomorphic": isomorphic}


def solve_invertible(m: ExactMatrix) -> bool:
    from .simplicial import solve_invertibility
    return solve_invertibility(m) is not None
