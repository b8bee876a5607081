"""
Dense complex matrix helpers: norms, vectorization, rank and least-norm solves.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` stored row-major.
Vectorization is column stacking, so the matrix unit E_ij (1-based) maps to
the unit vector with 0-based index ``(j - 1) * rows + (i - 1)``.

Matrix text format
------------------
::

    <rows> <cols>
    <entry> <entry> ... <entry>      # one line per row, cols entries
    ...

Each entry is a single token without spaces, written as ``<re><sign><im>j``
where ``<re>`` and ``<im>`` are Python float literals (``repr`` form), for
example ``1.5-0.25j`` or ``-0.0+3e-08j``.  On input any token accepted by
Python's ``complex()`` is allowed (``2``, ``-1j``, ``1e-3+2j``) provided the
value is finite.  Blank lines and lines starting with ``#`` are ignored.
Writing then reading returns a bit-identical matrix.
"""

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Inconsistent

__all__ = [
    'RankReport',
    'as_matrix',
    'frobenius_norm',
    'masked_norm',
    'pattern_mask',
    'vectorize',
    'devectorize',
    'unit_index',
    'rank_of',
    'solve_least_norm',
    'format_complex',
    'parse_complex',
    'dumps_matrix',
    'loads_matrix',
    'read_matrix',
    'write_matrix',
]

DEFAULT_RANK_TOL = 1e-10


@dataclass(frozen=True)
class RankReport:
    rank: int
    tolerance: float
    magnitudes: tuple = field(default=())

    def __int__(self):
        return self.rank


def as_matrix(P, square=False):
    """Return ``P`` as a finite 2-D complex128 array (copying only if needed)."""
    M = np.asarray(P, dtype=np.complex128)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    if M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be positive, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    if square and M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def frobenius_norm(P):
    return float(np.linalg.norm(np.asarray(P, dtype=np.complex128), 'fro'))


def pattern_mask(pattern, shape=None):
    """Boolean array that is True on the star positions of ``pattern``.

    ``pattern`` is anything with ``rows``, ``cols`` and 1-based ``stars``
    (e.g. :class:`miniversal.patterns.StarPattern`), or a boolean array.
    """
    if isinstance(pattern, np.ndarray):
        mask = pattern.astype(bool)
    else:
        mask = np.zeros((pattern.rows, pattern.cols), dtype=bool)
        for i, j in pattern.stars:
            mask[i - 1, j - 1] = True
    if shape is not None and mask.shape != tuple(shape):
        raise ValueError(f"pattern shape {mask.shape} does not match matrix shape {tuple(shape)}")
    return mask


def masked_norm(P, pattern):
    """Frobenius norm of the entries of ``P`` lying OFF the star positions."""
    P = np.asarray(P, dtype=np.complex128)
    mask = pattern_mask(pattern, P.shape)
    return float(np.linalg.norm(P[~mask]))


def vectorize(P):
    return np.asarray(P, dtype=np.complex128).reshape(-1, order='F')


def devectorize(v, rows, cols):
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.size != rows * cols:
        raise ValueError(f"vector of length {v.size} cannot be reshaped to {rows}x{cols}")
    return v.reshape((rows, cols), order='F')


def unit_index(i, j, rows):
    """0-based position of the 1-based matrix unit E_ij in a vectorized matrix."""
    return (j - 1) * rows + (i - 1)


def rank_of(P, tol=DEFAULT_RANK_TOL):
    """Numerical rank: singular values above ``tol`` times the largest one."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    P = np.asarray(P, dtype=np.complex128)
    if P.size == 0:
        return RankReport(0, tol, ())
    s = np.linalg.svd(P, compute_uv=False)
    top = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > tol * top)) if top > 0 else 0
    return RankReport(rank, tol, tuple(float(x) for x in s))


def solve_least_norm(M, b, tol=DEFAULT_RANK_TOL, rcond=DEFAULT_RANK_TOL):
    """
    Minimum-norm solution of ``M x = b``.

    ``b`` may be a vector or a matrix of right-hand sides (one per column).
    Raises :class:`Inconsistent` if some residual exceeds ``tol * (1 + |b|)``.
    """
    M = np.asarray(M, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if b.shape[0] != M.shape[0]:
        raise ValueError(f"right-hand side has {b.shape[0]} rows, matrix has {M.shape[0]}")
    x, *_ = np.linalg.lstsq(M, b, rcond=rcond)
    res = np.linalg.norm(M @ x - b, axis=0)
    bound = tol * (1.0 + np.linalg.norm(b, axis=0))
    if np.any(res > bound):
        worst = float(np.max(res))
        raise Inconsistent(f"system inconsistent at tolerance {tol:g}: residual {worst:.3e}",
                           residual=worst)
    return x


# -- text format ------------------------------------------------------------

def _fmt_real(x):
    # repr(float) round-trips exactly
    return repr(float(x))


def format_complex(z):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("cannot format a non-finite entry")
    im = z.imag
    sign = '-' if math.copysign(1.0, im) < 0 else '+'
    return f"{_fmt_real(z.real)}{sign}{_fmt_real(abs(im))}j"


def parse_complex(token):
    try:
        z = complex(token)
    except ValueError:
        raise ValueError(f"malformed complex entry {token!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite entry {token!r}")
    return z


def dumps_matrix(P):
    P = as_matrix(P)
    out = io.StringIO()
    out.write(f"{P.shape[0]} {P.shape[1]}\n")
    for row in P:
        out.write(' '.join(format_complex(z) for z in row))
        out.write('\n')
    return out.getvalue()


def loads_matrix(text):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith('#')]
    if not lines:
        raise ValueError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"header must be 'rows cols', got {lines[0]!r}")
    rows, cols = (int(t) for t in header)
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"expected {rows} rows, found {len(body)}")
    P = np.empty((rows, cols), dtype=np.complex128)
    for r, line in enumerate(body):
        tokens = line.split()
        if len(tokens) != cols:
            raise ValueError(f"row {r + 1}: expected {cols} entries, found {len(tokens)}")
        P[r] = [parse_complex(t) for t in tokens]
    return P


def read_matrix(path):
    with open(path) as fh:
        return loads_matrix(fh.read())


def write_matrix(path, P):
    with open(path, 'w') as fh:
        fh.write(dumps_matrix(P))
