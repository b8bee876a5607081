"""
Canonical blocks for congruence and the direct sums built from them.

Three block families make up a canonical matrix::

    H_m(lam) = [[0, I_m], [J_m(lam), 0]]     2m x 2m, lam != 0, lam != (-1)**(m+1)
    Gamma_n                                  n x n, alternating +-1 anti-triangle
    J_k(0)                                   nilpotent Jordan block

A :class:`CanonicalStructure` is an ordered list of such blocks.  Pattern
generation pairs blocks in that order, so :func:`canonicalize` puts the
blocks in the standard order (H blocks, Gamma blocks, J blocks by
decreasing size) and reports the permutation it applied.

Structure JSON::

    {"blocks": [{"kind": "H", "m": 2, "lambda": {"re": 0.5, "im": 0.0}},
                {"kind": "Gamma", "n": 3},
                {"kind": "J0", "k": 2}]}
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidLambda, InvalidStructure
from .matcore import as_matrix

__all__ = [
    'H', 'GAMMA', 'J0', 'KINDS',
    'CanonicalBlock',
    'CanonicalStructure',
    'SymSkewPair',
    'jordan_block',
    'gamma_block',
    'h_block',
    'assemble',
    'canonicalize',
    'split_sym_skew',
    'lambda_equal',
    'structure_from_json',
    'structure_to_json',
    'parse_blocks',
]

H = 'H'
GAMMA = 'Gamma'
J0 = 'J0'
KINDS = (H, GAMMA, J0)

_SIZE_KEY = {H: 'm', GAMMA: 'n', J0: 'k'}
_KIND_ORDER = {H: 0, GAMMA: 1, J0: 2}


def lambda_equal(a, b, tol=0.0):
    """Exact complex equality by default; ``tol > 0`` allows perturbed inputs."""
    a, b = complex(a), complex(b)
    if tol <= 0:
        return a == b
    return abs(a - b) <= tol


def _check_h_lambda(m, lam, tol=0.0):
    lam = complex(lam)
    if lambda_equal(lam, 0, tol):
        raise InvalidLambda(f"H_{m}(lambda) needs lambda != 0")
    excluded = (-1) ** (m + 1)
    if lambda_equal(lam, excluded, tol):
        raise InvalidLambda(
            f"H_{m}(lambda) needs lambda != (-1)^(m+1) = {excluded}; got {lam}")
    return lam


@dataclass(frozen=True)
class CanonicalBlock:
    kind: str
    size: int
    lam: complex = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidStructure(f"unknown block kind {self.kind!r}")
        if not isinstance(self.size, (int, np.integer)) or self.size < 1:
            raise InvalidStructure(f"block size must be a positive integer, got {self.size!r}")
        object.__setattr__(self, 'size', int(self.size))
        if self.kind == H:
            if self.lam is None:
                raise InvalidStructure("H blocks need a lambda")
            object.__setattr__(self, 'lam', _check_h_lambda(self.size, self.lam))
        elif self.lam is not None:
            raise InvalidStructure(f"{self.kind} blocks take no lambda")

    @property
    def dim(self):
        return 2 * self.size if self.kind == H else self.size

    def matrix(self):
        if self.kind == H:
            return h_block(self.size, self.lam)
        if self.kind == GAMMA:
            return gamma_block(self.size)
        return jordan_block(self.size, 0)

    def label(self, lam_symbol=None):
        if self.kind == H:
            lam = lam_symbol if lam_symbol is not None else _fmt_scalar(self.lam)
            return f"H_{self.size}({lam})"
        if self.kind == GAMMA:
            return f"Gamma_{self.size}"
        return f"J_{self.size}(0)"

    def to_dict(self):
        d = {'kind': self.kind, _SIZE_KEY[self.kind]: self.size}
        if self.kind == H:
            d['lambda'] = {'re': self.lam.real, 'im': self.lam.imag}
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            kind = d['kind']
        except (KeyError, TypeError):
            raise InvalidStructure(f"block descriptor needs a 'kind': {d!r}") from None
        if kind not in KINDS:
            raise InvalidStructure(f"unknown block kind {kind!r}")
        key = _SIZE_KEY[kind]
        if key not in d:
            raise InvalidStructure(f"{kind} block needs size field {key!r}")
        size = d[key]
        if isinstance(size, bool) or not isinstance(size, int):
            raise InvalidStructure(f"{kind} block size must be an integer, got {size!r}")
        lam = None
        if kind == H:
            raw = d.get('lambda')
            if not isinstance(raw, dict) or 're' not in raw:
                raise InvalidStructure("H block needs 'lambda': {'re': ..., 'im': ...}")
            lam = complex(float(raw['re']), float(raw.get('im', 0.0)))
        return cls(kind, size, lam)


@dataclass(frozen=True)
class CanonicalStructure:
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise InvalidStructure("a structure needs at least one block")
        for b in blocks:
            if not isinstance(b, CanonicalBlock):
                raise InvalidStructure(f"not a CanonicalBlock: {b!r}")
        jsizes = [b.size for b in blocks if b.kind == J0]
        if any(a < b for a, b in zip(jsizes, jsizes[1:])):
            raise InvalidStructure(
                f"J_k(0) blocks must appear in weakly decreasing size order, got {jsizes}")
        object.__setattr__(self, 'blocks', blocks)

    @property
    def total_dim(self):
        return sum(b.dim for b in self.blocks)

    @property
    def offsets(self):
        out, pos = [], 0
        for b in self.blocks:
            out.append(pos)
            pos += b.dim
        return tuple(out)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def label(self, symbols=None):
        symbols = symbols or {}
        return ' + '.join(b.label(symbols.get(b.lam)) for b in self.blocks)

    def to_dict(self):
        return {'blocks': [b.to_dict() for b in self.blocks]}


def canonicalize(blocks):
    """Sort blocks into H, Gamma, J (decreasing) order.

    Returns ``(structure, perm)`` where ``perm[i]`` is the input index of the
    i-th block of the result.  The sort is stable within H and Gamma blocks.
    """
    blocks = list(blocks)
    perm = sorted(range(len(blocks)),
                  key=lambda i: (_KIND_ORDER[blocks[i].kind],
                                 -blocks[i].size if blocks[i].kind == J0 else 0, i))
    return CanonicalStructure(tuple(blocks[i] for i in perm)), tuple(perm)


def jordan_block(n, lam):
    if n < 1:
        raise ValueError("n must be positive")
    J = np.diag(np.full(n, complex(lam)))
    J += np.diag(np.ones(n - 1, dtype=np.complex128), 1)
    return J


def gamma_block(n):
    """Gamma_n: entries (i, n+1-i) and, for i >= 2, (i, n+2-i) equal to (-1)**(n-i)."""
    if n < 1:
        raise ValueError("n must be positive")
    G = np.zeros((n, n), dtype=np.complex128)
    for i in range(1, n + 1):
        s = (-1) ** (n - i)
        G[i - 1, n - i] = s
        if i >= 2:
            G[i - 1, n - i + 1] = s
    return G


def h_block(m, lam):
    lam = _check_h_lambda(m, lam)
    Hm = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    Hm[:m, m:] = np.eye(m)
    Hm[m:, :m] = jordan_block(m, lam)
    return Hm


def assemble(structure):
    if not isinstance(structure, CanonicalStructure):
        structure = CanonicalStructure(tuple(structure))
    n = structure.total_dim
    A = np.zeros((n, n), dtype=np.complex128)
    for off, b in zip(structure.offsets, structure.blocks):
        A[off:off + b.dim, off:off + b.dim] = b.matrix()
    return A


@dataclass(frozen=True)
class SymSkewPair:
    sym: np.ndarray
    skew: np.ndarray


def split_sym_skew(A):
    """
    Split ``A`` into its symmetric and skew-symmetric parts.

    ``sym`` is exactly symmetric and ``skew`` exactly skew-symmetric in floating
    point.  ``sym + skew == A`` holds exactly whenever the sums and differences
    ``a_ij +- a_ji`` are representable (e.g. dyadic entries); otherwise it holds
    to within one rounding.
    """
    A = as_matrix(A, square=True)
    AT = A.T
    return SymSkewPair((A + AT) / 2, (A - AT) / 2)


# -- descriptors -------------------------------------------------------------

def structure_from_json(data):
    """Build a structure from a JSON string or an already-decoded dict."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InvalidStructure(f"structure is not valid JSON: {exc}") from None
    if not isinstance(data, dict) or not isinstance(data.get('blocks'), list):
        raise InvalidStructure("structure JSON must be an object with a 'blocks' list")
    return CanonicalStructure(tuple(CanonicalBlock.from_dict(d) for d in data['blocks']))


def structure_to_json(structure):
    return json.dumps(structure.to_dict(), sort_keys=True)


def parse_blocks(text):
    """
    Parse the compact block syntax used on the command line.

    Tokens are separated by whitespace: ``H<m>:<re>,<im>``, ``G<n>`` and
    ``J<k>``; for example ``"H1:0.5,0 G1 J2 J1"``.
    """
    blocks = []
    for tok in text.split():
        head = tok[0].upper()
        rest = tok[1:]
        try:
            if head == 'H':
                size, _, lam = rest.partition(':')
                re_s, _, im_s = lam.partition(',')
                blocks.append(CanonicalBlock(H, int(size), complex(float(re_s), float(im_s or 0))))
            elif head == 'G':
                blocks.append(CanonicalBlock(GAMMA, int(rest)))
            elif head == 'J':
                blocks.append(CanonicalBlock(J0, int(rest)))
            else:
                raise InvalidStructure(f"unknown block token {tok!r}")
        except ValueError as exc:
            if isinstance(exc, (InvalidStructure, InvalidLambda)):
                raise
            raise InvalidStructure(f"malformed block token {tok!r}") from None
    return CanonicalStructure(tuple(blocks))


def _fmt_scalar(z):
    z = complex(z)
    if z.imag == 0:
        x = z.real
        return str(int(x)) if x == int(x) else repr(x)
    return repr(z).strip('()')
