"""
(0,*) patterns: the star positions of a miniversal deformation.

Primitive shapes
----------------
All primitive shapes put their stars along one row or column.  The
north-west prototypes of size r x c are

* ``nwarrow``  stars fill the first column (r < c) or the first row (r > c);
* ``nwvdash``  alternate *,0,*,0,... along that line, starting with a star;
* ``nwmodels`` alternate 0,*,0,*,... along that line, starting with a zero.

When r == c either line may be used (``square_form='column'`` or ``'row'``).
The ``ne*``, ``se*`` and ``sw*`` variants are the prototypes rotated
clockwise by 90, 180 and 270 degrees; an m x n rotated shape comes from an
n x m prototype for the 90/270 degree turns.  ``updown`` is a full first
(``'top'``) or last (``'bottom'``) row, and ``P`` is the m x n shape (m <= n)
with stars at row m, columns m+2..n.

The full pattern of a canonical structure is assembled block by block:
one diagonal pattern per block plus a pair of off-diagonal patterns
``(D_ji, D_ij)`` for every pair of blocks i < j.
"""

import json
from dataclasses import dataclass

from .canonical import GAMMA, H, J0, CanonicalStructure, lambda_equal

__all__ = [
    'StarPattern',
    'SHAPE_KINDS',
    'primitive_shape',
    'diagonal_pattern',
    'offdiagonal_pattern',
    'full_pattern',
    'codimension',
    'pattern_from_json',
]

_ROTATION = {'nw': 0, 'ne': 90, 'se': 180, 'sw': 270}
_LINES = ('arrow', 'vdash', 'models')
SHAPE_KINDS = tuple(q + ln for q in _ROTATION for ln in _LINES) + ('updown', 'P', 'zero', 'full')
_KIND_ORDER = {H: 0, GAMMA: 1, J0: 2}


@dataclass(frozen=True)
class StarPattern:
    rows: int
    cols: int
    stars: frozenset = frozenset()

    def __post_init__(self):
        stars = frozenset((int(i), int(j)) for i, j in self.stars)
        for i, j in stars:
            if not (1 <= i <= self.rows and 1 <= j <= self.cols):
                raise ValueError(f"star ({i},{j}) outside a {self.rows}x{self.cols} pattern")
        object.__setattr__(self, 'stars', stars)

    def __len__(self):
        return len(self.stars)

    def __contains__(self, pos):
        return tuple(pos) in self.stars

    @property
    def shape(self):
        return (self.rows, self.cols)

    def sorted_stars(self):
        return sorted(self.stars)

    def union(self, other):
        if other.shape != self.shape:
            raise ValueError(f"cannot join patterns of shapes {self.shape} and {other.shape}")
        return StarPattern(self.rows, self.cols, self.stars | other.stars)

    def __or__(self, other):
        return self.union(other)

    def embed(self, rows, cols, row_offset, col_offset):
        """Place this pattern into a larger ``rows x cols`` one at a 0-based offset."""
        return StarPattern(rows, cols, {(i + row_offset, j + col_offset) for i, j in self.stars})

    def block(self, row_offset, col_offset, rows, cols):
        """Restrict to the ``rows x cols`` window at a 0-based offset."""
        return StarPattern(rows, cols, {
            (i - row_offset, j - col_offset) for i, j in self.stars
            if row_offset < i <= row_offset + rows and col_offset < j <= col_offset + cols})

    def render(self):
        return '\n'.join(
            ' '.join('*' if (i, j) in self.stars else '0' for j in range(1, self.cols + 1))
            for i in range(1, self.rows + 1))

    def to_dict(self):
        return {'rows': self.rows, 'cols': self.cols,
                'stars': [list(p) for p in self.sorted_stars()]}

    def to_json(self):
        return json.dumps(self.to_dict())


def pattern_from_json(data):
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    return StarPattern(int(data['rows']), int(data['cols']),
                       frozenset(tuple(p) for p in data['stars']))


# -- primitive shapes --------------------------------------------------------

def _prototype(line, r, c, square_form):
    if r < c:
        form = 'column'
    elif r > c:
        form = 'row'
    else:
        form = square_form
    if form not in ('column', 'row'):
        raise ValueError(f"square_form must be 'column' or 'row', got {square_form!r}")
    length = r if form == 'column' else c
    if line == 'arrow':
        idx = range(1, length + 1)
    elif line == 'vdash':
        idx = range(1, length + 1, 2)
    else:
        idx = range(2, length + 1, 2)
    if form == 'column':
        return {(k, 1) for k in idx}
    return {(1, k) for k in idx}


def _rotate(stars, r, c, angle):
    # clockwise rotation of an r x c prototype
    if angle == 0:
        return set(stars)
    if angle == 90:
        return {(j, r + 1 - i) for i, j in stars}
    if angle == 180:
        return {(r + 1 - i, c + 1 - j) for i, j in stars}
    return {(c + 1 - j, i) for i, j in stars}


def primitive_shape(kind, m, n, square_form='column', updown='top'):
    """Star pattern of the m x n primitive shape ``kind`` (see module docstring)."""
    if m < 1 or n < 1:
        raise ValueError("shape dimensions must be positive")
    if kind == 'zero':
        return StarPattern(m, n)
    if kind == 'full':
        return StarPattern(m, n, {(i, j) for i in range(1, m + 1) for j in range(1, n + 1)})
    if kind == 'updown':
        if updown not in ('top', 'bottom'):
            raise ValueError(f"updown must be 'top' or 'bottom', got {updown!r}")
        row = 1 if updown == 'top' else m
        return StarPattern(m, n, {(row, j) for j in range(1, n + 1)})
    if kind == 'P':
        if m > n:
            raise ValueError(f"P_mn needs m <= n, got m={m}, n={n}")
        return StarPattern(m, n, {(m, j) for j in range(m + 2, n + 1)})
    quadrant, line = kind[:2], kind[2:]
    if quadrant not in _ROTATION or line not in _LINES:
        raise ValueError(f"unknown shape kind {kind!r}")
    angle = _ROTATION[quadrant]
    r, c = (n, m) if angle in (90, 270) else (m, n)
    stars = _rotate(_prototype(line, r, c, square_form), r, c, angle)
    return StarPattern(m, n, stars)


# -- block patterns ----------------------------------------------------------

def _is_pm1(lam, tol):
    return lambda_equal(lam, 1, tol) or lambda_equal(lam, -1, tol)


def _is_inverse(lam, mu, tol):
    if tol > 0:
        return abs(lam * mu - 1) <= tol
    return lam * mu == 1 or lam == 1 / mu or mu == 1 / lam


class _Grid:
    """Accumulates stars of a block-partitioned pattern."""

    def __init__(self, rows, cols):
        self.rows, self.cols = rows, cols
        self.stars = set()

    def put(self, pattern, row_offset, col_offset):
        self.stars |= {(i + row_offset, j + col_offset) for i, j in pattern.stars}

    def pattern(self):
        return StarPattern(self.rows, self.cols, self.stars)


def diagonal_pattern(block, square_form='column', lam_tol=0.0):
    """Deformation pattern of a single canonical block."""
    shape = lambda kind, m, n: primitive_shape(kind, m, n, square_form)
    k = block.size
    if block.kind == H:
        g = _Grid(2 * k, 2 * k)
        g.put(shape('swarrow', k, k), k, 0)
        if lambda_equal(block.lam, 1, lam_tol):
            if k % 2:
                raise ValueError(f"H_{k}(1) requires even m")
            g.put(shape('nwmodels', k, k), 0, 0)
            g.put(shape('semodels', k, k), k, k)
        elif lambda_equal(block.lam, -1, lam_tol):
            if not k % 2:
                raise ValueError(f"H_{k}(-1) requires odd m")
            g.put(shape('nwvdash', k, k), 0, 0)
            g.put(shape('sevdash', k, k), k, k)
        return g.pattern()
    if block.kind == GAMMA:
        return shape('nwvdash' if k % 2 == 0 else 'nwmodels', k, k)
    return shape('swvdash', k, k)


def _needs_swap(bi, bj):
    oi, oj = _KIND_ORDER[bi.kind], _KIND_ORDER[bj.kind]
    if oi != oj:
        return oi > oj
    return bi.kind == J0 and bi.size < bj.size


def offdiagonal_pattern(bi, bj, square_form='column', updown='top', lam_tol=0.0):
    """
    Patterns ``(D_ji, D_ij)`` for the pair of blocks ``bi`` (earlier) and ``bj``.

    ``D_ji`` has shape ``bj.dim x bi.dim`` and ``D_ij`` the transposed shape.
    Pairs in non-standard order (e.g. a J block before a Gamma block, or a
    smaller J block first) are handled by swapping the roles of the blocks.
    """
    if _needs_swap(bi, bj):
        d_ij, d_ji = offdiagonal_pattern(bj, bi, square_form, updown, lam_tol)
        return d_ji, d_ij

    shape = lambda kind, m, n: primitive_shape(kind, m, n, square_form, updown)
    m, n = bi.size, bj.size
    g_ji = _Grid(bj.dim, bi.dim)
    g_ij = _Grid(bi.dim, bj.dim)

    if bi.kind == H and bj.kind == H:
        lam, mu = bi.lam, bj.lam
        same = lambda_equal(lam, mu, lam_tol)
        inverse = _is_inverse(lam, mu, lam_tol)
        if same and _is_pm1(lam, lam_tol):
            g_ji.put(shape('nwarrow', n, m), 0, 0)
            g_ji.put(shape('nearrow', n, m), 0, m)
            g_ji.put(shape('swarrow', n, m), n, 0)
            g_ji.put(shape('searrow', n, m), n, m)
        elif same:
            g_ji.put(shape('nearrow', n, m), 0, m)
            g_ji.put(shape('swarrow', n, m), n, 0)
        elif inverse:
            g_ji.put(shape('nwarrow', n, m), 0, 0)
            g_ji.put(shape('searrow', n, m), n, m)
    elif bi.kind == GAMMA and bj.kind == GAMMA:
        if (m - n) % 2 == 0:
            g_ji.put(shape('nwarrow', n, m), 0, 0)
    elif bi.kind == J0 and bj.kind == J0:
        # m >= n here
        g_ji.put(shape('swvdash', n, m), 0, 0)
        if n % 2:
            g_ji.put(shape('P', n, m), 0, 0)
        g_ij.put(shape('swvdash', m, n), 0, 0)
    elif bi.kind == H and bj.kind == GAMMA:
        if lambda_equal(bi.lam, (-1) ** (n + 1), lam_tol):
            g_ji.put(shape('nwarrow', n, m), 0, 0)
            g_ji.put(shape('nearrow', n, m), 0, m)
    elif bj.kind == J0:
        # (H, J) and (Gamma, J)
        if n % 2:
            g_ji.put(shape('updown', n, bi.dim), 0, 0)
    return g_ji.pattern(), g_ij.pattern()


def full_pattern(structure, square_form='column', updown='top', lam_tol=0.0):
    """The complete pattern for a canonical structure, embedded at block offsets."""
    if not isinstance(structure, CanonicalStructure):
        structure = CanonicalStructure(tuple(structure))
    size = structure.total_dim
    offsets = structure.offsets
    blocks = structure.blocks
    g = _Grid(size, size)
    for i, b in enumerate(blocks):
        g.put(diagonal_pattern(b, square_form, lam_tol), offsets[i], offsets[i])
        for j in range(i + 1, len(blocks)):
            d_ji, d_ij = offdiagonal_pattern(b, blocks[j], square_form, updown, lam_tol)
            g.put(d_ji, offsets[j], offsets[i])
            g.put(d_ij, offsets[i], offsets[j])
    return g.pattern()


def codimension(structure, **kwargs):
    """Dimension count of the pattern: the codimension of the congruence class."""
    return len(full_pattern(structure, **kwargs))
