"""
Reproducible random canonical structures for verification sweeps.

Eigenvalues of H blocks are drawn from dyadic complex numbers so that
A_can and its symmetric/skew parts are exact in floating point, and so that
forced coincidences lam = mu and lam = 1/mu are exact as well.
"""

import itertools

import numpy as np

from .canonical import GAMMA, H, J0, CanonicalBlock, CanonicalStructure, canonicalize

__all__ = ['coverage_tags', 'random_structure', 'sweep_structures', 'small_structures',
           'REQUIRED_TAGS']

# units whose inverses are again dyadic: 1/(1+i) = (1-i)/2
_UNITS = (1, 1j, -1, -1j, 1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j)
_MARGIN = 0.25

REQUIRED_TAGS = frozenset({
    'block:H', 'block:Gamma', 'block:J0', 'H:lam=1', 'H:lam=-1',
    'HH:distinct', 'HH:inverse', 'HH:equal', 'HH:equal=pm1',
    'GG:even', 'GG:odd', 'JJ:n_even', 'JJ:n_odd', 'JJ:tie',
    'HG:generic', 'HG:special', 'HJ:n_even', 'HJ:n_odd', 'GJ:n_even', 'GJ:n_odd',
})


def coverage_tags(structure):
    """Which block types, special eigenvalues and pairing cases a structure exercises."""
    tags = set()
    blocks = structure.blocks
    for b in blocks:
        tags.add(f'block:{b.kind}')
        if b.kind == H and b.lam in (1, -1):
            tags.add(f'H:lam={int(b.lam.real)}')
    order = {H: 0, GAMMA: 1, J0: 2}
    for x, y in itertools.combinations(blocks, 2):
        if order[x.kind] > order[y.kind] or (x.kind == y.kind == J0 and x.size < y.size):
            x, y = y, x
        if x.kind == y.kind == H:
            lam, mu = x.lam, y.lam
            if lam == mu:
                tags.add('HH:equal=pm1' if lam in (1, -1) else 'HH:equal')
            elif lam * mu == 1:
                tags.add('HH:inverse')
            else:
                tags.add('HH:distinct')
        elif x.kind == y.kind == GAMMA:
            tags.add('GG:even' if (x.size - y.size) % 2 == 0 else 'GG:odd')
        elif x.kind == y.kind == J0:
            tags.add('JJ:n_odd' if y.size % 2 else 'JJ:n_even')
            if x.size == y.size:
                tags.add('JJ:tie')
        elif x.kind == H and y.kind == GAMMA:
            tags.add('HG:special' if x.lam == (-1) ** (y.size + 1) else 'HG:generic')
        else:
            pre = 'HJ' if x.kind == H else 'GJ'
            tags.add(f'{pre}:n_odd' if y.size % 2 else f'{pre}:n_even')
    return tags


def _well_separated(lam, others):
    # either an exact coincidence or comfortably far from one
    for special in (1, -1):
        if lam != special and abs(lam - special) < _MARGIN:
            return False
    for mu in others:
        if lam != mu and abs(lam - mu) < _MARGIN:
            return False
        if lam * mu != 1 and abs(lam * mu - 1) < _MARGIN:
            return False
    return abs(lam) >= 0.3


def _is_dyadic(z, bits=20):
    return (z.real * 2 ** bits).is_integer() and (z.imag * 2 ** bits).is_integer()


def _pick_lambda(rng, m, others):
    special = complex(1 if m % 2 == 0 else -1)
    r = rng.random()
    if r < 0.2:
        lam = special
    elif others and r < 0.45:
        lam = complex(others[rng.integers(len(others))])
    elif others and r < 0.65:
        lam = 1 / complex(others[rng.integers(len(others))])
    elif rng.random() < 0.5:
        lam = complex(_UNITS[rng.integers(len(_UNITS))]) * 2.0 ** int(rng.integers(-1, 2))
    else:
        lam = complex(rng.integers(-160, 161), rng.integers(-160, 161)) / 64
    if not (_is_dyadic(lam) and _well_separated(lam, others)):
        return None
    return lam


def random_structure(rng, max_dim):
    """A random canonical structure of total dimension between 1 and ``max_dim``."""
    while True:
        target = int(rng.integers(1, max_dim + 1))
        blocks, used = [], 0
        while used < target:
            room = target - used
            kind = (H, GAMMA, J0)[rng.choice(3, p=(0.35, 0.3, 0.35))]
            if kind == H and room < 2:
                continue
            jsizes = [b.size for b in blocks if b.kind == J0]
            if kind == H:
                m = int(rng.integers(1, room // 2 + 1))
                lams = [b.lam for b in blocks if b.kind == H]
                lam = _pick_lambda(rng, m, lams)
                if lam is None or lam == (-1) ** (m + 1):
                    continue
                blocks.append(CanonicalBlock(H, m, lam))
            elif kind == J0 and jsizes and rng.random() < 0.4 and jsizes[-1] <= room:
                blocks.append(CanonicalBlock(J0, int(rng.choice(jsizes))))
            else:
                blocks.append(CanonicalBlock(kind, int(rng.integers(1, room + 1))))
            used += blocks[-1].dim
        if used <= max_dim:
            return canonicalize(blocks)[0]


def _curated():
    B = CanonicalBlock
    return [
        (B(H, 2, 1), B(H, 2, 1)),
        (B(H, 1, -1), B(H, 1, -1), B(J0, 1)),
        (B(H, 1, 2), B(H, 1, 0.5), B(GAMMA, 2)),
        (B(H, 1, 1 + 1j), B(H, 2, 1 + 1j)),
        (B(H, 1, 1 + 1j), B(H, 1, 0.5 - 0.5j), B(H, 1, 4)),
        (B(H, 1, -1), B(GAMMA, 2), B(GAMMA, 1)),
        (B(H, 2, 1), B(GAMMA, 1), B(J0, 2)),
        (B(H, 1, 2j), B(GAMMA, 3), B(J0, 1)),
        (B(GAMMA, 3), B(GAMMA, 1), B(J0, 2), B(J0, 2)),
        (B(J0, 3), B(J0, 3), B(J0, 1)),
        (B(J0, 4), B(J0, 2), B(J0, 2)),
        (B(H, 3, -1), B(J0, 1), B(J0, 1)),
        (B(GAMMA, 2), B(J0, 3), B(J0, 1)),
    ]


def sweep_structures(count, max_dim=8, seed=0):
    """
    ``count`` structures: a fixed list covering every pairing case, then
    random ones from a generator seeded with ``seed``.
    """
    out = []
    for blocks in _curated():
        s = CanonicalStructure(blocks)
        if s.total_dim <= max_dim:
            out.append(s)
    rng = np.random.default_rng(seed)
    while len(out) < count:
        out.append(random_structure(rng, max_dim))
    return out[:count]


def small_structures(n):
    """
    Every canonical structure of total size ``n`` for n <= 3: H blocks take
    the representative generic eigenvalue 2 or their valid special value.
    """
    def parts(remaining, max_key):
        if remaining == 0:
            yield []
            return
        for key in _block_keys(remaining):
            if key > max_key:
                continue
            kind, size, tag = key
            dim = 2 * size if kind == 'a' else size
            for rest in parts(remaining - dim, key):
                yield [key] + rest

    out = []
    for combo in parts(n, ('z', 99, 'z')):
        generic = iter((2.0, 3.0, 5.0))
        blocks = []
        for kind, size, tag in combo:
            if kind == 'a':
                lam = next(generic) if tag == 'generic' else float(tag)
                blocks.append(CanonicalBlock(H, size, lam))
            elif kind == 'b':
                blocks.append(CanonicalBlock(GAMMA, size))
            else:
                blocks.append(CanonicalBlock(J0, size))
        out.append(canonicalize(blocks)[0])
    out.reverse()
    return out


def _block_keys(limit):
    # sortable keys: 'a' = H, 'b' = Gamma, 'c' = J0
    keys = []
    for m in range(1, limit // 2 + 1):
        keys.append(('a', m, 'generic'))
        keys.append(('a', m, '1' if m % 2 == 0 else '-1'))
    for s in range(1, limit + 1):
        keys.append(('b', s, ''))
        keys.append(('c', s, ''))
    return sorted(keys, reverse=True)
