"""
Reduction of a perturbed matrix A + E to A + D with D supported on a pattern.

Given A and a pattern whose span together with T(A) covers every matrix,
fix for each matrix unit E_ij a correction F_ij with

    E_ij + F_ij^T A + A F_ij  in span(pattern)        (F_ij = 0 on the pattern)

and iterate, starting from M_1 = E,

    C_k = sum_ij m_ij^(k) F_ij
    A + M_{k+1} = (I + C_k)^T (A + M_k) (I + C_k).

The off-pattern part of M_k decays quadratically and the product of the
factors (I + C_k) converges to a congruence S with S^T (A + E) S = A + D.
With a = |A|, f = sum |F_ij| and 0 < eps < 1 / max(f (a + 1)(f + 2), 3),
convergence is certified for |E| < eps**5, where the off-pattern norms stay
below delta_k < eps**(2k) and the full norms below tau_k < eps**3.
"""

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import Inconsistent, MaxIterExceeded, NotSpanning
from .matcore import (DEFAULT_RANK_TOL, as_matrix, dumps_matrix, frobenius_norm,
                      masked_norm, pattern_mask, rank_of, solve_least_norm, vectorize)
from .tangent import tangent_operator

__all__ = [
    'ReducerSetup',
    'TraceRecord',
    'ReductionTrace',
    'ReductionResult',
    'prepare',
    'step',
    'reduce',
    'bound_sequence',
    'certified_eps',
]


@dataclass(frozen=True)
class ReducerSetup:
    A: np.ndarray
    pattern: object
    F: dict
    a: float
    f: float
    eps_max: float
    tol: float
    # column (j-1)*n + (i-1) holds vec(F_ij)
    F_columns: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class TraceRecord:
    k: int
    norm_M: float
    masked_M: float
    norm_C: float = None
    delta_bound: float = None
    tau_bound: float = None

    def to_dict(self):
        return {'k': self.k, 'norm_M': self.norm_M, 'masked_M': self.masked_M,
                'norm_C': self.norm_C, 'delta_bound': self.delta_bound,
                'tau_bound': self.tau_bound}


@dataclass
class ReductionTrace:
    records: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0

    def to_jsonl(self):
        return ''.join(json.dumps(r.to_dict(), sort_keys=True) + '\n' for r in self.records)


@dataclass
class ReductionResult:
    S: np.ndarray
    D: np.ndarray
    trace: ReductionTrace
    residual: float
    eps: float = None
    in_basin: bool = False

    def to_dict(self):
        return {'S': dumps_matrix(self.S), 'D': dumps_matrix(self.D),
                'residual': self.residual, 'converged': self.trace.converged,
                'iterations': self.trace.iterations, 'eps': self.eps,
                'in_basin': self.in_basin}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def certified_eps(a, f):
    """Upper end of the admissible eps interval: 1 / max(f (a + 1)(f + 2), 3)."""
    return 1.0 / max(f * (a + 1) * (f + 2), 3.0)


def prepare(A, pattern, tol=DEFAULT_RANK_TOL):
    """
    Compute the corrections F_ij for every matrix unit.

    Each F_ij is the minimum-norm solution of the off-pattern part of
    ``E_ij + F^T A + A F = 0``; raises :class:`NotSpanning` when T(A) plus the
    pattern does not cover the whole matrix space.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    mask = pattern_mask(pattern, A.shape)
    off = ~mask.reshape(-1, order='F')
    T = tangent_operator(A).op_matrix
    T_off = T[off]
    n_off = int(off.sum())
    if n_off and rank_of(T_off, tol).rank < n_off:
        raise NotSpanning("T(A) + span(pattern) is not the whole matrix space")

    F_columns = np.zeros((n * n, n * n), dtype=np.complex128)
    if n_off:
        rhs = -np.eye(n * n)[off][:, off]
        try:
            X = solve_least_norm(T_off, rhs, tol=max(tol, 1e-12), rcond=tol)
        except Inconsistent as exc:
            raise NotSpanning(str(exc)) from None
        F_columns[:, off] = X

    F = {}
    for j in range(1, n + 1):
        for i in range(1, n + 1):
            F[(i, j)] = F_columns[:, (j - 1) * n + (i - 1)].reshape((n, n), order='F').copy()
    a = frobenius_norm(A)
    f = float(sum(np.linalg.norm(F_columns[:, k]) for k in range(n * n)))
    return ReducerSetup(A, pattern, F, a, f, certified_eps(a, f), tol, F_columns)


def step(setup, M):
    """One iteration: returns ``(M_next, C)``."""
    n = setup.n
    C = (setup.F_columns @ vectorize(M)).reshape((n, n), order='F')
    AM = setup.A + M
    # expansion of (I + C)^T (A + M) (I + C) - A
    CtAM = C.T @ AM
    M_next = M + CtAM + AM @ C + CtAM @ C
    return M_next, C


def _bounds(eps):
    delta = tau = eps ** 5
    while True:
        yield delta, tau
        delta, tau = delta * tau / eps, tau + delta / eps


def bound_sequence(eps, k_max):
    """
    The majorants (delta_k, tau_k), k = 1..k_max.

    delta_1 = tau_1 = eps**5, delta_{k+1} = delta_k tau_k / eps,
    tau_{k+1} = tau_k + delta_k / eps.  Raises if a value leaves
    0 < delta_k < eps**(2k), 0 < tau_k < eps**3 (including float underflow).
    """
    if not 0 < eps < 1 / 3:
        raise ValueError(f"eps must lie in (0, 1/3), got {eps}")
    out = []
    for k, (delta, tau) in zip(range(1, k_max + 1), _bounds(eps)):
        if not (0 < delta < eps ** (2 * k) and 0 < tau < eps ** 3):
            raise ArithmeticError(f"bound violated at k={k}: delta={delta}, tau={tau}")
        out.append((delta, tau))
    return out


def reduce(setup, E, eps=None, stop_tol=None, max_iter=60):
    """
    Run the iteration on the perturbation ``E`` until the off-pattern part vanishes.

    ``eps`` is only used to report the certified bounds; ``stop_tol`` defaults
    to ``1e-12 * (1 + |A|)``.  Raises :class:`MaxIterExceeded` (with the trace)
    after ``max_iter`` steps or when the off-pattern norm stagnates.
    """
    A = setup.A
    n = setup.n
    E = as_matrix(E, square=True)
    if E.shape != A.shape:
        raise ValueError(f"perturbation shape {E.shape} does not match {A.shape}")
    if stop_tol is None:
        stop_tol = 1e-12 * (1 + setup.a)

    in_basin = False
    bounds = iter(())
    if eps is not None:
        if not 0 < eps < setup.eps_max:
            warnings.warn(f"eps={eps:g} is outside the certified range (0, {setup.eps_max:.3g})")
        in_basin = 0 < eps < setup.eps_max and frobenius_norm(E) < eps ** 5
        if not frobenius_norm(E) < eps ** 5:
            warnings.warn(f"|E| = {frobenius_norm(E):.3g} is not below eps**5 = {eps ** 5:.3g}; "
                          "convergence is not certified")
        if 0 < eps < 1 / 3:
            bounds = _bounds(eps)

    trace = ReductionTrace()
    S = np.eye(n, dtype=np.complex128)
    M = E.copy()
    stagnant = 0
    prev = None
    for k in range(1, max_iter + 2):
        masked = masked_norm(M, setup.pattern)
        delta, tau = next(bounds, (None, None))
        rec = dict(k=k, norm_M=frobenius_norm(M), masked_M=masked,
                   delta_bound=delta, tau_bound=tau)
        if masked < stop_tol:
            trace.records.append(TraceRecord(**rec))
            trace.converged = True
            break
        if k > max_iter:
            trace.records.append(TraceRecord(**rec))
            raise MaxIterExceeded(f"no convergence after {max_iter} iterations", trace)
        if prev is not None and masked > 0.9 * prev:
            stagnant += 1
            if stagnant >= 3:
                trace.records.append(TraceRecord(**rec))
                raise MaxIterExceeded(f"off-pattern norm stagnated at {masked:.3e}", trace)
        else:
            stagnant = 0
        if not math.isfinite(masked):
            trace.records.append(TraceRecord(**rec))
            raise MaxIterExceeded("iteration diverged", trace)
        prev = masked
        M, C = step(setup, M)
        S = S @ (np.eye(n) + C)
        trace.records.append(TraceRecord(norm_C=frobenius_norm(C), **rec))
        trace.iterations = k

    mask = pattern_mask(setup.pattern, A.shape)
    D = np.where(mask, M, 0)
    return ReductionResult(S, D, trace, masked_norm(M, setup.pattern), eps, in_basin)
