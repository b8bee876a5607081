"""
Command-line front end.

Exit codes: 0 success, 1 analysis failure (verdict or convergence), 2 bad input.
"""

import argparse
import json
import os
import sys
from importlib import resources

import numpy as np

from .canonical import (_fmt_scalar, assemble, parse_blocks, split_sym_skew,
                        structure_from_json)
from .errors import InvalidLambda, InvalidStructure, MaxIterExceeded, NotSpanning
from .matcore import DEFAULT_RANK_TOL, dumps_matrix, frobenius_norm, read_matrix
from .patterns import StarPattern, full_pattern, pattern_from_json
from .reducer import prepare, reduce
from .sweep import small_structures, sweep_structures
from .tangent import check_transversality, greedy_miniversal

FIXTURE = 'small_forms.txt'
GENERIC_SYMBOL = 'λ'


class InputError(Exception):
    pass


# -- rendering ---------------------------------------------------------------

def render_matrix(A, symbols=None):
    symbols = symbols or {}
    cells = [[symbols.get(complex(z), None) or _fmt_scalar(z) for z in row] for row in A]
    width = max(len(c) for row in cells for c in row)
    return [' '.join(c.rjust(width) for c in row) for row in cells]


def side_by_side(left, right, gap='   '):
    width = max(len(s) for s in left)
    return [l.ljust(width) + gap + r for l, r in zip(left, right)]


def render_form(structure, symbols=None):
    A = assemble(structure)
    D = full_pattern(structure)
    lines = [structure.label(symbols)]
    lines += side_by_side(render_matrix(A, symbols), D.render().splitlines())
    return '\n'.join(lines)


def examples_text():
    out = []
    for n in (2, 3):
        forms = small_structures(n)
        out.append(f"# {n}x{n}: {len(forms)} canonical forms")
        for s in forms:
            out.append(render_form(s, {complex(2.0): GENERIC_SYMBOL}))
            out.append('')
    return '\n'.join(out)


# -- input -------------------------------------------------------------------

def load_structure(arg):
    if arg is None:
        raise InputError("--structure is required")
    try:
        if os.path.exists(arg):
            with open(arg) as fh:
                return structure_from_json(fh.read())
        if arg.lstrip().startswith('{'):
            return structure_from_json(arg)
        return parse_blocks(arg)
    except (InvalidStructure, InvalidLambda) as exc:
        raise InputError(f"invalid structure: {exc}") from None


def _emit(args, text, payload):
    if args.format == 'json':
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# -- commands ----------------------------------------------------------------

def cmd_pattern(args):
    s = load_structure(args.structure)
    A = assemble(s)
    D = full_pattern(s)
    text = '\n'.join([s.label()] + side_by_side(render_matrix(A), D.render().splitlines()))
    _emit(args, text, {'structure': s.to_dict(), 'A_can': dumps_matrix(A),
                       'pattern': D.to_dict(), 'codimension': len(D)})
    return 0


def cmd_codim(args):
    s = load_structure(args.structure)
    k = len(full_pattern(s))
    _emit(args, str(k), {'structure': s.to_dict(), 'codimension': k})
    return 0


def cmd_greedy(args):
    s = load_structure(args.structure)
    A = assemble(s)
    g = greedy_miniversal(A, args.tol)
    k = len(full_pattern(s))
    text = '\n'.join([g.render(), f"stars: {len(g)} (pattern codimension {k})"])
    _emit(args, text, {'pattern': g.to_dict(), 'stars': len(g), 'codimension': k})
    return 0 if len(g) == k else 1


def cmd_split(args):
    s = load_structure(args.structure)
    A = assemble(s)
    D = full_pattern(s)
    pair = split_sym_skew(A)
    sym_stars = D.stars | {(j, i) for i, j in D.stars}
    skew_stars = {(i, j) for i, j in sym_stars if i != j}
    sym_p = StarPattern(D.rows, D.cols, sym_stars)
    skew_p = StarPattern(D.rows, D.cols, skew_stars)
    lines = [s.label(), 'symmetric part:']
    lines += side_by_side(render_matrix(pair.sym), sym_p.render().splitlines())
    lines.append('skew-symmetric part:')
    lines += side_by_side(render_matrix(pair.skew), skew_p.render().splitlines())
    _emit(args, '\n'.join(lines), {'sym': dumps_matrix(pair.sym), 'skew': dumps_matrix(pair.skew),
                                   'sym_pattern': sym_p.to_dict(),
                                   'skew_pattern': skew_p.to_dict()})
    return 0


def _verify_one(case_id, s, tol, pattern=None):
    A = assemble(s)
    p = full_pattern(s) if pattern is None else pattern
    if p.shape != A.shape:
        raise InputError(f"pattern shape {p.shape} does not match {A.shape}")
    rep = check_transversality(A, p, tol, structure=s)
    return {'case': case_id, 'structure': s.label(), **rep.to_dict()}


def cmd_verify(args):
    if args.sweep is not None:
        structures = sweep_structures(args.cases, args.sweep, args.seed)
    elif args.examples:
        structures = small_structures(2) + small_structures(3)
    else:
        structures = [load_structure(args.structure)]
    pattern = None
    if args.pattern is not None:
        try:
            with open(args.pattern) as fh:
                pattern = pattern_from_json(fh.read())
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"cannot read pattern: {exc}") from None
    reports = [_verify_one(i, s, args.tol, pattern) for i, s in enumerate(structures)]
    reports.sort(key=lambda r: r['case'])
    failing = [r for r in reports if r['verdict'] != 'DirectSum']
    if args.format == 'json':
        print(json.dumps({'reports': reports, 'failures': len(failing)}, sort_keys=True))
    else:
        for r in reports:
            if r in failing or len(reports) == 1:
                print(f"[{r['case']}] {r['structure']}: {r['verdict']} "
                      f"(tangent rank {r['tangent_rank']}, stars {r['pattern_stars']}, "
                      f"combined rank {r['combined_rank']} of {r['ambient_dim']})")
        print(f"{len(reports) - len(failing)}/{len(reports)} DirectSum")
    return 1 if failing else 0


def cmd_reduce(args):
    s = load_structure(args.structure)
    A = assemble(s)
    if args.perturbation is None:
        raise InputError("--perturbation is required")
    try:
        E = read_matrix(args.perturbation)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read perturbation: {exc}") from None
    if E.shape != A.shape:
        raise InputError(f"perturbation is {E.shape[0]}x{E.shape[1]}, structure is {A.shape[0]}x{A.shape[1]}")
    pattern = full_pattern(s)
    try:
        setup = prepare(A, pattern, args.tol)
    except NotSpanning as exc:
        print(f"NotSpanning: {exc}", file=sys.stderr)
        return 2
    try:
        res = reduce(setup, E, eps=args.eps, stop_tol=args.stop_tol, max_iter=args.max_iter)
    except MaxIterExceeded as exc:
        if args.trace:
            with open(args.trace, 'w') as fh:
                fh.write(exc.trace.to_jsonl())
        print(f"MaxIterExceeded: {exc}", file=sys.stderr)
        if exc.trace is not None:
            sys.stderr.write(exc.trace.to_jsonl())
        return 1
    doc = res.to_dict()
    doc['structure'] = s.to_dict()
    doc['eps_max'] = setup.eps_max
    doc['E_norm'] = frobenius_norm(E)
    # without --eps, some admissible eps certifies the run iff |E| < eps_max**5
    certified = res.in_basin if args.eps is not None else doc['E_norm'] < setup.eps_max ** 5
    doc['certified_basin'] = certified
    if args.trace:
        with open(args.trace, 'w') as fh:
            fh.write(res.trace.to_jsonl())
    text = json.dumps(doc, sort_keys=True, indent=2)
    if args.output:
        with open(args.output, 'w') as fh:
            fh.write(text + '\n')
    if args.format == 'json':
        print(text)
    else:
        basin = 'inside' if certified else 'outside'
        print(f"converged in {res.trace.iterations} iterations, residual {res.residual:.3e} "
              f"({basin} the certified basin, eps_max {setup.eps_max:.3e})")
        print('S =')
        print('\n'.join(render_matrix(np.round(res.S, 12))))
        print('D =')
        print('\n'.join(render_matrix(np.round(res.D, 12))))
    return 0


def cmd_examples(args):
    text = examples_text()
    print(text)
    if args.no_check:
        return 0
    expected = resources.files('miniversal').joinpath('data', FIXTURE).read_text(encoding='utf-8')
    if expected != text + '\n':
        print("examples output differs from the stored fixture", file=sys.stderr)
        return 1
    return 0


COMMANDS = {
    'pattern': cmd_pattern,
    'codim': cmd_codim,
    'verify': cmd_verify,
    'greedy': cmd_greedy,
    'reduce': cmd_reduce,
    'examples': cmd_examples,
    'split': cmd_split,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog='miniversal',
        description='Miniversal deformations of complex matrices under congruence.')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--structure', help="structure JSON file, inline JSON, or blocks like 'H1:0.5,0 G1 J1'")
    common.add_argument('--tol', type=float, default=DEFAULT_RANK_TOL, help='relative rank tolerance')
    common.add_argument('--format', choices=('text', 'json'), default='text')
    sub = parser.add_subparsers(dest='command', required=True)

    for name in ('pattern', 'codim', 'greedy', 'split'):
        sub.add_parser(name, parents=[common])

    v = sub.add_parser('verify', parents=[common])
    v.add_argument('--sweep', type=int, metavar='N_MAX', help='random structures of size <= N_MAX')
    v.add_argument('--cases', type=int, default=200)
    v.add_argument('--seed', type=int, default=0)
    v.add_argument('--examples', action='store_true', help='all 2x2 and 3x3 canonical forms')
    v.add_argument('--pattern', help='pattern JSON to test instead of the generated one')

    r = sub.add_parser('reduce', parents=[common])
    r.add_argument('--perturbation', '-E', help='matrix text file with E')
    r.add_argument('--eps', type=float)
    r.add_argument('--stop-tol', type=float)
    r.add_argument('--max-iter', type=int, default=60)
    r.add_argument('--trace', help='write the trace as JSON lines')
    r.add_argument('--output', help='write the result JSON here')

    e = sub.add_parser('examples')
    e.add_argument('--no-check', action='store_true', help='skip the fixture comparison')
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
