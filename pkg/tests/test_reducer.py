import json
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from miniversal.canonical import assemble, parse_blocks
from miniversal.errors import MaxIterExceeded, NotSpanning
from miniversal.matcore import frobenius_norm, masked_norm
from miniversal.patterns import StarPattern, full_pattern
from miniversal.reducer import bound_sequence, certified_eps, prepare, reduce, step
from miniversal.tangent import project_onto_pattern

from conftest import random_complex

EMPTY1 = StarPattern(1, 1)


def _perturbation(rng, n, size):
    E = random_complex(rng, (n, n))
    return E * (size / frobenius_norm(E))


def _setup(tokens):
    s = parse_blocks(tokens)
    A = assemble(s)
    return A, full_pattern(s), prepare(A, full_pattern(s))


def test_prepare_scalar():
    setup = prepare([[1]], EMPTY1)
    assert setup.F[(1, 1)].tolist() == [[-0.5]]
    assert setup.a == 1 and setup.f == 0.5
    assert setup.eps_max == pytest.approx(1 / 3)
    setup = prepare([[0]], StarPattern(1, 1, {(1, 1)}))
    assert not setup.F[(1, 1)].any() and setup.f == 0


def test_prepare_membership():
    A, P, setup = _setup('G1 G1')
    assert set(setup.F) == {(1, 1), (1, 2), (2, 1), (2, 2)}
    for (i, j), F in setup.F.items():
        E = np.zeros((2, 2))
        E[i - 1, j - 1] = 1
        assert masked_norm(E + F.T @ A + A @ F, P) <= 1e-12
    assert not setup.F[(2, 1)].any()


def test_prepare_membership_sweep(rng):
    for tokens in ('H1:2,0 G1', 'H2:1,0 J1', 'G3 J2', 'J3 J1 J1', 'H1:-1,0 H1:-1,0'):
        A, P, setup = _setup(tokens)
        n = A.shape[0]
        for (i, j), F in setup.F.items():
            E = np.zeros((n, n))
            E[i - 1, j - 1] = 1
            assert masked_norm(E + F.T @ A + A @ F, P) <= 1e-10
            if (i, j) in P:
                assert not F.any()


def test_prepare_not_spanning():
    with pytest.raises(NotSpanning):
        prepare(np.eye(2), StarPattern(2, 2))
    with pytest.raises(NotSpanning):
        prepare(np.zeros((2, 2)), StarPattern(2, 2, {(1, 1)}))


def test_step_fixed_points(rng):
    A, P, setup = _setup('H1:2,0 G1')
    M, C = step(setup, np.zeros((3, 3)))
    assert not M.any() and not C.any()
    on = np.zeros((3, 3), complex)
    for i, j in P.stars:
        on[i - 1, j - 1] = 1e-3 * (1 + 2j)
    M, C = step(setup, on)
    assert not C.any() and np.array_equal(M, on)


def test_step_scalar():
    setup = prepare([[1]], EMPTY1)
    for e in (1e-1, 1e-3, 2.0 ** -20):
        M2, C = step(setup, np.array([[e]]))
        assert C[0, 0] == -e / 2
        assert M2[0, 0] == pytest.approx(-3 * e ** 2 / 4 + e ** 3 / 4, rel=1e-12)


def test_step_expansion_identity(rng):
    A, P, setup = _setup('G2 J2 J1')
    M = random_complex(rng, A.shape, 1e-2)
    M_next, C = step(setup, M)
    I = np.eye(A.shape[0])
    direct = (I + C).T @ (A + M) @ (I + C) - A
    assert np.allclose(M_next, direct, atol=1e-14)


def test_bound_sequence_examples():
    for eps in (0.01, 0.1, 0.3):
        seq = bound_sequence(eps, 2)
        assert seq[0] == (eps ** 5, eps ** 5)
        assert seq[1][0] == pytest.approx(eps ** 9, rel=1e-14)
        assert seq[1][1] == pytest.approx(eps ** 5 + eps ** 4, rel=1e-14)
    seq = bound_sequence(0.1, 20)
    assert all(d < 10.0 ** (-2 * i) for i, (d, _) in enumerate(seq, 1))


def test_bound_sequence_matches_exact_recurrence():
    eps = Fraction(1, 10)
    d = t = eps ** 5
    exact = []
    for _ in range(12):
        exact.append((d, t))
        d, t = d * t / eps, t + d / eps
    for (df, tf), (de, te) in zip(bound_sequence(0.1, 12), exact):
        assert df == pytest.approx(float(de), rel=1e-12)
        assert tf == pytest.approx(float(te), rel=1e-12)


@pytest.mark.parametrize('eps', [0, -0.1, 1 / 3, 0.5])
def test_bound_sequence_range(eps):
    with pytest.raises(ValueError):
        bound_sequence(eps, 3)


def test_certified_eps():
    assert certified_eps(1, 0.5) == pytest.approx(1 / 3)
    assert certified_eps(2, 3) == pytest.approx(1 / 45)


def test_reduce_zero():
    A, P, setup = _setup('H1:2,0 G1 J1')
    res = reduce(setup, np.zeros_like(A))
    assert np.array_equal(res.S, np.eye(A.shape[0])) and not res.D.any()
    assert res.trace.iterations == 0 and res.trace.converged


def test_reduce_identity_pair(rng):
    A, P, setup = _setup('G1 G1')
    E = _perturbation(rng, 2, 1e-6)
    res = reduce(setup, E)
    assert res.trace.converged
    R = res.S.T @ (A + E) @ res.S - A
    assert masked_norm(R, P) < 1e-12
    assert np.allclose(R, res.D, atol=1e-12)


def test_reduce_linearization(rng):
    A, P, setup = _setup('H1:2,0 G1')
    for size in (1e-3, 1e-4, 1e-5):
        E = _perturbation(rng, 3, size)
        res = reduce(setup, E)
        D1, _ = project_onto_pattern(A, P, E)
        assert frobenius_norm(res.D - D1) <= 10 * size ** 2


def test_congruence_exact_every_iteration(rng):
    A, P, setup = _setup('H1:0.5,1 G2 J2')
    n = A.shape[0]
    E = _perturbation(rng, n, 1e-3)
    S, M = np.eye(n), E.copy()
    for _ in range(6):
        M, C = step(setup, M)
        S = S @ (np.eye(n) + C)
        err = frobenius_norm(S.T @ (A + E) @ S - (A + M))
        assert err <= 1e-10 * (1 + frobenius_norm(A))


def test_d_independent_of_eps(rng):
    A, P, setup = _setup('G1 G1 J1')
    E = _perturbation(rng, 3, 1e-5)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        runs = [reduce(setup, E, eps=eps) for eps in (None, 0.5 * setup.eps_max, 0.9 * setup.eps_max)]
    for r in runs[1:]:
        assert frobenius_norm(r.D - runs[0].D) <= 1e-11


def test_reduce_in_basin_scalar():
    setup = prepare([[1]], EMPTY1)
    eps = 0.3
    res = reduce(setup, [[0.5 * eps ** 5]], eps=eps)
    assert res.in_basin
    for rec in res.trace.records:
        assert rec.masked_M < eps ** (2 * rec.k) and rec.norm_M < eps ** 3
        assert rec.masked_M <= rec.delta_bound and rec.norm_M <= rec.tau_bound
    prod = math.prod(1 + eps ** (2 * k - 1) for k in range(1, 60))
    assert frobenius_norm(res.S - np.eye(1)) < prod - 1
    assert frobenius_norm(res.D) <= eps ** 3


def test_reduce_warns_outside_basin(rng):
    A, P, setup = _setup('G1 G1')
    with pytest.warns(UserWarning):
        reduce(setup, _perturbation(rng, 2, 1e-3), eps=0.9)
    with pytest.warns(UserWarning, match='not certified'):
        res = reduce(setup, _perturbation(rng, 2, 1e-3), eps=0.5 * setup.eps_max)
    assert not res.in_basin and res.trace.converged


def test_reduce_stagnation():
    setup = prepare([[1]], EMPTY1)
    # A + E = 0 cannot be congruent to anything near A
    with pytest.raises(MaxIterExceeded) as info:
        reduce(setup, [[-1.0]])
    assert info.value.trace.records


def test_reduce_max_iter(rng):
    A, P, setup = _setup('G1 G1')
    with pytest.raises(MaxIterExceeded):
        reduce(setup, _perturbation(rng, 2, 1e-2), max_iter=1)


def test_reduce_shape_mismatch():
    setup = prepare([[1]], EMPTY1)
    with pytest.raises(ValueError):
        reduce(setup, np.zeros((2, 2)))


def test_result_serialization(rng):
    A, P, setup = _setup('G1 J1')
    res = reduce(setup, _perturbation(rng, 2, 1e-4))
    doc = json.loads(res.to_json())
    assert doc['converged'] and doc['S'].startswith('2 2\n')
    lines = res.trace.to_jsonl().splitlines()
    assert len(lines) == len(res.trace.records)
    assert set(json.loads(lines[0])) == {'k', 'norm_M', 'masked_M', 'norm_C',
                                         'delta_bound', 'tau_bound'}
