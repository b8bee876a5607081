"""
Tangent spaces of congruence orbits and transversality tests.

The tangent space of the orbit of A is T(A) = {C^T A + A C}.  In vectorized
coordinates (column stacking) the map C -> C^T A + A C is the n^2 x n^2
matrix ``(A^T kron I) K + (I kron A)`` with K the commutation matrix.

A pattern D is transversal to the orbit when T(A) + D(C) is the whole
matrix space, and gives a miniversal deformation when that sum is direct.
Both facts are decided by numerical rank at a relative tolerance.
"""

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .canonical import H
from .errors import NotTransversal
from .matcore import (DEFAULT_RANK_TOL, as_matrix, devectorize,
                      rank_of, solve_least_norm, unit_index, vectorize)
from .patterns import StarPattern

__all__ = [
    'Verdict',
    'TangentOperator',
    'PairTangentOperator',
    'TransversalityReport',
    'commutation_matrix',
    'tangent_operator',
    'pattern_columns',
    'check_transversality',
    'project_onto_pattern',
    'greedy_miniversal',
    'pair_tangent_operator',
    'check_pair_transversality',
    'lambda_warnings',
]

NEAR_DEGENERATE = 1e-8


class Verdict(str, enum.Enum):
    DIRECT_SUM = 'DirectSum'
    SUM_NOT_DIRECT = 'SumNotDirect'
    NOT_SPANNING = 'NotSpanning'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TangentOperator:
    base: np.ndarray
    op_matrix: np.ndarray

    def apply(self, C):
        n = self.base.shape[0]
        return devectorize(self.op_matrix @ vectorize(C), n, n)

    @property
    def rank(self):
        return rank_of(self.op_matrix).rank


@dataclass(frozen=True)
class PairTangentOperator:
    """(S, R) -> (S^T M + N R, R^T N + M S) for S m x n and R n x m."""
    blocks: tuple
    op_matrix: np.ndarray

    def apply(self, S, R):
        M, N = self.blocks
        m, n = M.shape[0], N.shape[0]
        out = self.op_matrix @ np.concatenate([vectorize(S), vectorize(R)])
        return devectorize(out[:n * m], n, m), devectorize(out[n * m:], m, n)


@dataclass
class TransversalityReport:
    """Ranks behind a transversality decision.

    ``n`` is the size of the (block) matrix under test and ``ambient_dim`` the
    dimension of the space that must be spanned: n**2 for the full test,
    2*m*n for a pair of blocks.
    """
    n: int
    tangent_rank: int
    pattern_stars: int
    combined_rank: int
    verdict: Verdict
    ambient_dim: int
    tolerance: float = DEFAULT_RANK_TOL
    warnings: list = field(default_factory=list)

    @property
    def is_direct(self):
        return self.verdict is Verdict.DIRECT_SUM

    @property
    def is_spanning(self):
        return self.verdict is not Verdict.NOT_SPANNING

    def to_dict(self):
        return {'n': self.n, 'ambient_dim': self.ambient_dim, 'tangent_rank': self.tangent_rank,
                'pattern_stars': self.pattern_stars, 'combined_rank': self.combined_rank,
                'verdict': str(self.verdict), 'tolerance': self.tolerance,
                'warnings': list(self.warnings)}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _classify(ambient, tangent_rank, stars, combined_rank):
    if combined_rank < ambient:
        return Verdict.NOT_SPANNING
    if tangent_rank + stars == ambient:
        return Verdict.DIRECT_SUM
    return Verdict.SUM_NOT_DIRECT


def commutation_matrix(rows, cols):
    """Permutation K with K vec(X) = vec(X^T) for X of shape rows x cols."""
    K = np.zeros((rows * cols, rows * cols))
    for i in range(rows):
        for j in range(cols):
            K[i * cols + j, j * rows + i] = 1.0
    return K


def tangent_operator(A):
    A = as_matrix(A, square=True)
    n = A.shape[0]
    eye = np.eye(n)
    op = np.kron(A.T, eye) @ commutation_matrix(n, n) + np.kron(eye, A)
    return TangentOperator(A, op)


def pattern_columns(pattern, rows=None):
    """Columns vec(E_ij) for every star (i, j), in sorted star order."""
    rows = pattern.rows if rows is None else rows
    stars = pattern.sorted_stars()
    P = np.zeros((pattern.rows * pattern.cols, len(stars)))
    for k, (i, j) in enumerate(stars):
        P[unit_index(i, j, rows), k] = 1.0
    return P


def lambda_warnings(structure, threshold=NEAR_DEGENERATE):
    """Flag H-block eigenvalues within ``threshold`` of an excluded/special value."""
    out = []
    hs = [b for b in structure.blocks if b.kind == H]
    for b in hs:
        for special in (1, -1):
            d = abs(b.lam - special)
            if 0 < d < threshold:
                out.append(f"{b.label()}: lambda within {d:.1e} of {special}")
    for x in range(len(hs)):
        for y in range(x + 1, len(hs)):
            lam, mu = hs[x].lam, hs[y].lam
            d_same, d_inv = abs(lam - mu), abs(lam * mu - 1)
            if 0 < d_same < threshold:
                out.append(f"{hs[x].label()} and {hs[y].label()}: lambda ~ mu ({d_same:.1e})")
            if 0 < d_inv < threshold:
                out.append(f"{hs[x].label()} and {hs[y].label()}: lambda ~ 1/mu ({d_inv:.1e})")
    return out


def _report(op, P, size, ambient, tol):
    tr = rank_of(op, tol).rank
    combined = rank_of(np.hstack([op, P]), tol)
    warnings = []
    s = np.asarray(combined.magnitudes)
    if combined.rank and s[0] > 0:
        margin = s[combined.rank - 1] / s[0]
        if margin < 1e3 * tol:
            warnings.append(f"rank decision is marginal (relative singular value {margin:.1e})")
    verdict = _classify(ambient, tr, P.shape[1], combined.rank)
    return TransversalityReport(size, tr, P.shape[1], combined.rank, verdict, ambient, tol,
                                warnings)


def check_transversality(A, pattern, tol=DEFAULT_RANK_TOL, structure=None):
    """
    Decide whether T(A) and the span of the pattern form a direct sum.

    Passing the ``structure`` that produced A adds warnings for nearly degenerate lambdas.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    if pattern.shape != (n, n):
        raise ValueError(f"pattern shape {pattern.shape} does not match {n}x{n}")
    rep = _report(tangent_operator(A).op_matrix, pattern_columns(pattern), n, n * n, tol)
    if structure is not None:
        rep.warnings.extend(lambda_warnings(structure))
    return rep


def project_onto_pattern(A, pattern, C, tol=DEFAULT_RANK_TOL):
    """
    The unique D in span(pattern) with D = C + X^T A + A X.

    Returns ``(D, X)`` with X of minimal norm.  Raises :class:`NotTransversal`
    unless the pattern gives a direct sum with T(A).
    """
    A = as_matrix(A, square=True)
    C = as_matrix(C, square=True)
    n = A.shape[0]
    op = tangent_operator(A).op_matrix
    P = pattern_columns(pattern)
    rep = _report(op, P, n, n * n, tol)
    if not rep.is_direct:
        raise NotTransversal(f"pattern is not a direct complement of T(A): {rep.verdict}")
    c = vectorize(C)
    # op x - P d = -c
    sol = solve_least_norm(np.hstack([op, -P]), -c, tol=max(tol, 1e-12), rcond=tol)
    d = sol[n * n:]
    D = devectorize(P @ d, n, n)
    x = solve_least_norm(op, vectorize(D) - c, tol=max(tol, 1e-12), rcond=tol)
    return D, devectorize(x, n, n)


def greedy_miniversal(A, tol=DEFAULT_RANK_TOL):
    """
    Complete a basis of T(A) with matrix units scanned in row-major order.

    A unit E_ij is kept iff it is not in the span of T(A) and the units
    kept so far.  The result has n^2 - rank T(A) stars.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    op = tangent_operator(A).op_matrix
    u, s, _ = np.linalg.svd(op)
    r = int(np.count_nonzero(s > tol * s[0])) if s.size and s[0] > 0 else 0
    Q = u[:, :r]
    basis = [Q]
    kept = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            e = np.zeros(n * n, dtype=np.complex128)
            e[unit_index(i, j, n)] = 1.0
            Qc = np.hstack(basis) if len(basis) > 1 else basis[0]
            v = e - Qc @ (Qc.conj().T @ e)
            v = v - Qc @ (Qc.conj().T @ v)
            nv = np.linalg.norm(v)
            if nv > np.sqrt(tol):
                kept.append((i, j))
                basis.append((v / nv)[:, None])
    return StarPattern(n, n, frozenset(kept))


def pair_tangent_operator(M, N):
    M = as_matrix(M, square=True)
    N = as_matrix(N, square=True)
    m, n = M.shape[0], N.shape[0]
    cols = []
    for k in range(m * n):
        S = devectorize(np.eye(m * n)[k], m, n)
        cols.append(np.concatenate([vectorize(S.T @ M), vectorize(M @ S)]))
    for k in range(n * m):
        R = devectorize(np.eye(n * m)[k], n, m)
        cols.append(np.concatenate([vectorize(N @ R), vectorize(R.T @ N)]))
    return PairTangentOperator((M, N), np.column_stack(cols))


def check_pair_transversality(M, N, pattern_ji, pattern_ij, tol=DEFAULT_RANK_TOL):
    """Blockwise transversality test on the 2mn-dimensional pair space."""
    pt = pair_tangent_operator(M, N)
    m, n = pt.blocks[0].shape[0], pt.blocks[1].shape[0]
    if pattern_ji.shape != (n, m) or pattern_ij.shape != (m, n):
        raise ValueError("pair patterns must have shapes n x m and m x n")
    P_ji = pattern_columns(pattern_ji)
    P_ij = pattern_columns(pattern_ij)
    P = np.zeros((2 * m * n, P_ji.shape[1] + P_ij.shape[1]))
    P[:n * m, :P_ji.shape[1]] = P_ji
    P[n * m:, P_ji.shape[1]:] = P_ij
    return _report(pt.op_matrix, P, m + n, 2 * m * n, tol)
