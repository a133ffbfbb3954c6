from fractions import Fraction

import pytest

from mctwist.dgcore import DgError, check_dga
from mctwist.exactlinalg import ExactMatrix, Ring
from mctwist.mc import is_mc
from mctwist.polyderham import (
    MatrixPoly,
    hom_h0_dimension,
    hom_solutions,
    one_form,
    pairwise_h0_table,
    polynomial_de_rham_dga,
)

Q = Ring.Q()


def test_quotient_dga_passes_axioms():
    pd = polynomial_de_rham_dga(Q, 8)
    assert check_dga(pd)["ok"]
    assert len(pd.gm.labels_of_degree(0)) == 9
    assert len(pd.gm.labels_of_degree(1)) == 8
    with pytest.raises(DgError, match="characteristic zero"):
        polynomial_de_rham_dga(Ring.GF(5), 4)


def test_every_one_form_is_mc():
    pd = polynomial_de_rham_dga(Q, 6)
    for coeffs in ([1], [0, 1], [2, 0, 0, 5], [Fraction(1, 2), 3]):
        ok, _ = is_mc(pd, pd.element(one_form(pd, coeffs)))
        assert ok
    # degree-0 elements are not MC candidates
    from mctwist.mc import MCError
    with pytest.raises(MCError):
        is_mc(pd, pd.element(("z", 1)))


def test_no_polynomial_solutions_between_zero_and_dz():
    zero = MatrixPoly.scalar(Q, [])
    dz = MatrixPoly.scalar(Q, [1])
    basis, certified = hom_solutions(zero, dz, 8)
    assert basis == [] and certified
    # the reversed pair too: f' - f = 0 has no polynomial solutions
    basis, certified = hom_solutions(dz, zero, 8)
    assert basis == [] and certified


def test_quotient_artifact_is_avoided():
    # inside the naive (z^9)-quotient the closedness system loses its top
    # equation and acquires a rank-one kernel (the truncated exponential);
    # the degreewise solve keeps every equation and reports zero
    pd = polynomial_de_rham_dga(Q, 8)
    from mctwist.mc import hom_twist, zero_mc, MCElement
    dz_el = MCElement(pd, pd.element(one_form(pd, [1])))
    tw = hom_twist(pd, zero_mc(pd), dz_el)
    rep = tw.cohomology()
    assert rep.rank(0) == 1  # the truncation artifact, visible and documented
    assert hom_h0_dimension(MatrixPoly.scalar(Q, []), MatrixPoly.scalar(Q, [1]), 8) \
        == (0, True)


def test_constants_are_the_diagonal_homs():
    zero = MatrixPoly.scalar(Q, [])
    basis, certified = hom_solutions(zero, zero, 8)
    assert certified and len(basis) == 1
    assert basis[0][0] == ExactMatrix.from_rows(Q, [[1]]) or basis[0][0].get(0, 0) != 0
    assert all(m.is_zero() for m in basis[0][1:])


def test_pairwise_table_for_three_forms():
    zero = MatrixPoly.scalar(Q, [])
    zdz = MatrixPoly.scalar(Q, [0, 1])
    two_zdz = MatrixPoly.scalar(Q, [0, 2])
    table = pairwise_h0_table([zero, zdz, two_zdz], 8)
    for (i, j), entry in table.items():
        if i != j:
            assert entry["dim"] == 0 and entry["certified"], (i, j)
        else:
            assert entry["dim"] == 1


def test_matrix_valued_case():
    # x = 0, y = N dz with N nilpotent: f' + N f = 0 still has only f = 0
    # among polynomials? no: f constant with N f = 0 works; check exactness
    n2 = ExactMatrix.from_rows(Q, [[0, 1], [0, 0]])
    y = MatrixPoly(Q, 2, {0: n2})
    x = MatrixPoly(Q, 2, {})
    basis, certified = hom_solutions(x, y, 6)
    assert not certified  # the Sylvester leading map has a kernel
    for sol in basis:
        # verify the ODE residual exactly
        for m in range(8):
            acc = ExactMatrix.zeros(Q, 2, 2)
            if m + 1 <= 6:
                acc = acc + sol[m + 1].scale(m + 1)
            for k, ym in y.coeffs.items():
                if 0 <= m - k <= 6:
                    acc = acc + ym * sol[m - k]
            assert acc.is_zero()


def test_polynomial_mc_category_summary():
    from mctwist.polyderham import polynomial_mc_category
    zero = MatrixPoly.scalar(Q, [])
    zdz = MatrixPoly.scalar(Q, [0, 1])
    two_zdz = MatrixPoly.scalar(Q, [0, 2])
    cat = polynomial_mc_category([zero, zdz, two_zdz], 8)
    for i in range(3):
        for j in range(3):
            want = 1 if i == j else 0
            assert cat["dims"][(i, j)] == want
            if i != j:
                # off-diagonal answers are certified complete; the diagonal
                # leading map has the scalars in its kernel, so those stay
                # honestly cap-bounded
                assert cat["certified"][(i, j)]
    assert cat["isomorphic"] == []
