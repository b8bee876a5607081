import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from miniversal.canonical import assemble, jordan_block, parse_blocks
from miniversal.errors import NotTransversal
from miniversal.matcore import frobenius_norm
from miniversal.patterns import StarPattern, diagonal_pattern, full_pattern, offdiagonal_pattern
from miniversal.sweep import random_structure
from miniversal.tangent import (Verdict, check_pair_transversality, check_transversality,
                                commutation_matrix, greedy_miniversal, lambda_warnings,
                                pair_tangent_operator, project_onto_pattern, tangent_operator)

from conftest import random_complex

I2 = np.eye(2)


def _exact_images(A, n):
    """Rows vec(E^T A + A E) for every matrix unit, in exact arithmetic."""
    A = sympy.Matrix(A)
    out = []
    for j in range(n):
        for i in range(n):
            E = sympy.zeros(n, n)
            E[i, j] = 1
            out.append(list((E.T * A + A * E).T))  # column stacking
    return out


def _exact_verdict(A, stars):
    n = len(A)
    rows = _exact_images(A, n)
    for i, j in stars:
        e = [0] * (n * n)
        e[(j - 1) * n + (i - 1)] = 1
        rows.append(e)
    t = sympy.Matrix(rows[:n * n]).rank()
    c = sympy.Matrix(rows).rank()
    if c < n * n:
        return Verdict.NOT_SPANNING
    return Verdict.DIRECT_SUM if t + len(stars) == n * n else Verdict.SUM_NOT_DIRECT


def test_commutation_matrix(rng):
    X = random_complex(rng, (2, 3))
    K = commutation_matrix(2, 3)
    assert np.array_equal(K @ X.reshape(-1, order='F'), X.T.reshape(-1, order='F'))


def test_tangent_examples():
    assert tangent_operator([[0]]).rank == 0
    op = tangent_operator([[1]])
    assert op.op_matrix.tolist() == [[2]]
    assert op.rank == 1
    J = jordan_block(2, 0)
    assert tangent_operator(J).rank == 3
    assert sympy.Matrix(_exact_images([[0, 1], [0, 0]], 2)).rank() == 3


def test_apply_matches_direct_product(rng):
    for n in (1, 2, 4, 6):
        A = random_complex(rng, (n, n))
        op = tangent_operator(A)
        for _ in range(3):
            C = random_complex(rng, (n, n))
            assert np.allclose(op.apply(C), C.T @ A + A @ C, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1), st.floats(-2, 2))
def test_second_order_term(n, seed, eps):
    rng = np.random.default_rng(seed)
    A = random_complex(rng, (n, n))
    C = random_complex(rng, (n, n))
    S = np.eye(n) + eps * C
    lhs = frobenius_norm(S.T @ A @ S - A - eps * (C.T @ A + A @ C))
    bound = frobenius_norm(C) ** 2 * frobenius_norm(A) * eps ** 2
    assert lhs <= bound * (1 + 1e-9) + 1e-12 * (1 + frobenius_norm(A)) * (1 + frobenius_norm(C)) ** 2


def test_transversality_examples():
    rep = check_transversality(I2, StarPattern(2, 2, {(2, 1)}))
    assert rep.verdict is Verdict.DIRECT_SUM and rep.is_direct
    assert (rep.tangent_rank, rep.pattern_stars, rep.combined_rank) == (3, 1, 4)
    assert check_transversality(np.zeros((2, 2)), StarPattern(2, 2)).verdict is Verdict.NOT_SPANNING
    both = StarPattern(2, 2, {(1, 2), (2, 1)})
    rep = check_transversality(I2, both)
    assert rep.verdict is Verdict.SUM_NOT_DIRECT
    assert rep.verdict is _exact_verdict([[1, 0], [0, 1]], both.stars)
    assert rep.is_spanning and not rep.is_direct


def test_transversality_against_exact_oracle():
    cases = [('J2', {(2, 1)}), ('J2', {(1, 1)}), ('J2', {(1, 2)}), ('G2', {(1, 1)}),
             ('G2', {(2, 2)}), ('G2', {(1, 2)}), ('J1 J1', {(1, 1), (1, 2), (2, 1)}),
             ('G1 J1', {(2, 1), (2, 2)}), ('G1 J1', {(1, 2), (2, 1)})]
    for tokens, st_ in cases:
        A = assemble(parse_blocks(tokens))
        exact = _exact_verdict(A.real.astype(int).tolist(), st_)
        assert check_transversality(A, StarPattern(2, 2, st_)).verdict is exact, (tokens, st_)


def test_report_serialization():
    rep = check_transversality(I2, StarPattern(2, 2, {(2, 1)}))
    d = rep.to_dict()
    assert d['verdict'] == 'DirectSum' and d['ambient_dim'] == 4 and d['n'] == 2
    assert '"verdict": "DirectSum"' in rep.to_json()
    with pytest.raises(ValueError):
        check_transversality(I2, StarPattern(3, 3))


def test_lambda_warnings():
    s = parse_blocks('H1:2,0 H1:0.5000000001,0')
    assert any('1/mu' in w for w in lambda_warnings(s))
    assert lambda_warnings(parse_blocks('H1:2,0 H1:0.5,0')) == []
    rep = check_transversality(assemble(s), full_pattern(s), structure=s)
    assert rep.warnings


def test_project_examples(rng):
    P = StarPattern(2, 2, {(2, 1)})
    D, X = project_onto_pattern(I2, P, np.zeros((2, 2)))
    assert np.abs(D).max() < 1e-14 and np.abs(X).max() < 1e-14
    C = np.array([[0, 0], [3 - 1j, 0]])
    D, X = project_onto_pattern(I2, P, C)
    assert np.allclose(D, C, atol=1e-13) and np.abs(X).max() < 1e-13
    # hand solve: D = C + X^T + X, X^T + X an arbitrary symmetric matrix
    D, X = project_onto_pattern(I2, P, [[0, 1], [0, 0]])
    assert np.allclose(D, [[0, 0], [-1, 0]], atol=1e-13)
    assert np.allclose(D, np.array([[0, 1], [0, 0]]) + X.T + X, atol=1e-13)


def test_project_matches_dense_solve(rng):
    s = parse_blocks('H1:2,0 G1')
    A = assemble(s)
    P = full_pattern(s)
    n = 3
    T = tangent_operator(A).op_matrix
    cols = [np.eye(n * n)[(j - 1) * n + (i - 1)] for i, j in P.sorted_stars()]
    for _ in range(5):
        C = random_complex(rng, (n, n))
        # square system [T | -E_stars] restricted to a basis of T's column space
        u, sv, _ = np.linalg.svd(T)
        r = int((sv > 1e-10 * sv[0]).sum())
        M = np.column_stack([u[:, :r], -np.column_stack(cols)])
        sol = np.linalg.solve(M, -C.reshape(-1, order='F'))
        d_oracle = np.column_stack(cols) @ sol[r:]
        D, X = project_onto_pattern(A, P, C)
        assert np.allclose(D.reshape(-1, order='F'), d_oracle, atol=1e-10)
        assert np.allclose(D, C + X.T @ A + A @ X, atol=1e-10)


def test_project_requires_direct_sum():
    with pytest.raises(NotTransversal):
        project_onto_pattern(I2, StarPattern(2, 2, {(1, 2), (2, 1)}), np.eye(2))


def test_greedy_examples():
    assert greedy_miniversal([[1]]).stars == set()
    assert greedy_miniversal([[0]]).stars == {(1, 1)}
    s = parse_blocks('H1:2,0 H1:0.5,0')
    g = greedy_miniversal(assemble(s))
    assert len(g) == len(full_pattern(s))
    assert check_transversality(assemble(s), g).is_direct


def test_greedy_scan_order():
    # row-major: for I_2 the first unit outside T(I) is (1,2)
    assert greedy_miniversal(I2).stars == {(1, 2)}


def test_pair_operator_apply(rng):
    M, N = random_complex(rng, (2, 2)), random_complex(rng, (3, 3))
    pt = pair_tangent_operator(M, N)
    S, R = random_complex(rng, (2, 3)), random_complex(rng, (3, 2))
    X, Y = pt.apply(S, R)
    assert X.shape == (3, 2) and Y.shape == (2, 3)
    assert np.allclose(X, S.T @ M + N @ R)
    assert np.allclose(Y, R.T @ N + M @ S)


def test_pair_examples():
    one = np.eye(1)
    rep = check_pair_transversality(one, one, StarPattern(1, 1, {(1, 1)}), StarPattern(1, 1))
    assert rep.verdict is Verdict.DIRECT_SUM and rep.ambient_dim == 2
    zero = np.zeros((1, 1))
    d_ji, d_ij = offdiagonal_pattern(*parse_blocks('J1 J1').blocks)
    assert check_pair_transversality(zero, zero, d_ji, d_ij).verdict is Verdict.DIRECT_SUM
    H = assemble(parse_blocks('H1:2,0'))
    rep = check_pair_transversality(H, one, StarPattern(1, 2), StarPattern(2, 1))
    assert rep.verdict is Verdict.DIRECT_SUM
    with pytest.raises(ValueError):
        check_pair_transversality(H, one, StarPattern(2, 1), StarPattern(2, 1))


def _two_block(seed):
    rng = np.random.default_rng(seed)
    while True:
        s = random_structure(rng, 7)
        if len(s.blocks) == 2:
            return s


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.booleans())
def test_blockwise_iff_global(seed, drop_star):
    s = _two_block(seed)
    b1, b2 = s.blocks
    d11, d22 = diagonal_pattern(b1), diagonal_pattern(b2)
    d21, d12 = offdiagonal_pattern(b1, b2)
    if drop_star:
        # knock one star out of the pair patterns to exercise the failing side
        if d21.stars:
            d21 = StarPattern(d21.rows, d21.cols, d21.sorted_stars()[1:])
        elif d12.stars:
            d12 = StarPattern(d12.rows, d12.cols, d12.sorted_stars()[1:])
    A1, A2 = b1.matrix(), b2.matrix()
    n1 = b1.dim
    glob = d11.embed(s.total_dim, s.total_dim, 0, 0) | d22.embed(s.total_dim, s.total_dim, n1, n1)
    glob = glob | d21.embed(s.total_dim, s.total_dim, n1, 0) | d12.embed(s.total_dim, s.total_dim, 0, n1)
    g = check_transversality(assemble(s), glob).is_direct
    parts = (check_transversality(A1, d11).is_direct and check_transversality(A2, d22).is_direct
             and check_pair_transversality(A1, A2, d21, d12).is_direct)
    assert g == parts
    if not drop_star:
        assert g
