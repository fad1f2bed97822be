#!/usr/bin/env python3
"""
Command-line front end for jcells.

Usage:
    python -m jcells centralizer --type C --rank 3 --partition 2,2,2 --json
    python -m jcells centralizer --type B --rank 3 --all
    python -m jcells idempotents --group S3 --stabilizer "(12)"
    python -m jcells specialize --group Z4 --stabilizer 2 --at 2
    python -m jcells char --group Spin --rank 3 --which delta+
    python -m jcells jmodel --name sl2-j0 --fiber zeta4
    python -m jcells rigid --example sl2 --check
    python -m jcells poincare --type B --rank 3
    python -m jcells coinvariants --matrix "0,1;1,0"
    python -m jcells fdeg-check --den "1+q" --type A --rank 1

Exit codes: 0 success, 1 a mathematical check failed, 2 usage error.
"""

import sys
import json
import argparse
import logging
from typing import Dict, List, Optional, Sequence

from jcells.adjquot import LatticeAuto, actions_from_generators, coinvariants, component_quotient
from jcells.arith import HalfLaurent, poly_divides_power
from jcells.classgrp import (LieType, Partition, a_value, centralizer, centralizer_dimension,
                             levi_candidates, partition_table, poincare_polynomial)
from jcells.config import LOG_LEVEL
from jcells.fingroup import GAction, standard_groups
from jcells.jmodels import closure_test, fiber_image_rank, load_model, unique_nonisomorphism_locus
from jcells.ksquare import abelian_idempotents, build_module, check_family, s3_idempotents
from jcells.report import ValidationResult, summarize
from jcells.repring import (RingSpec, decompose_sl2, fundamental_character, in_odd_module,
                            verify_presentation)
from jcells.rigid import check_structure, load_example, rigid_determinant, vanishing_vs_poincare

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Raised by a verb for option combinations argparse cannot express."""


def _emit(args, payload: Dict, text_lines: Sequence[str] = ()):
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        for line in text_lines:
            print(line)


def _finish(args, results: List[ValidationResult], payload: Dict) -> int:
    if args.json:
        payload['checks'] = [r.to_dict() for r in results]
        print(json.dumps(payload, indent=2, default=str))
        return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED
    for r in results:
        r.print_results()
    return summarize(results)


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def cmd_centralizer(args) -> int:
    t = LieType(args.type, args.rank)
    if args.all:
        table = partition_table(t)
        _emit(args, {'type': str(t), 'partitions': table.to_dict(orient='records')},
              [table.to_string(index=False)])
        return EXIT_OK
    if not args.partition:
        raise UsageError("centralizer needs --partition or --all")
    u = Partition.parse(args.partition)
    descriptor = centralizer(t, u)
    payload = descriptor.to_dict()
    payload['a_value'] = a_value(t, u)
    payload['centralizer_dimension'] = centralizer_dimension(t, u)
    payload['levi_candidates'] = [c.to_dict() for c in levi_candidates(t, u)]
    _emit(args, payload, [
        f"{t}, u = {u}",
        f"  centralizer:     {descriptor.to_text()}",
        f"  component group: order {descriptor.component_order}",
        f"  dim Z(u):        {payload['centralizer_dimension']}",
        f"  a-value:         {payload['a_value']}",
    ] + [f"  Levi:            {c.dual_label()}" for c in levi_candidates(t, u)])
    return EXIT_OK


def _action_from_args(args) -> GAction:
    group = standard_groups(args.group)
    stabilizer = group.closure(group.element(x) for x in (args.stabilizer or []))
    return GAction.coset_action(group, stabilizer)


def _family(action: GAction, image: Optional[Sequence[str]] = None):
    group = action.group
    if image:
        elements = group.closure(group.element(x) for x in image)
        return [(f"t{i}", k) for i, k in enumerate(s3_idempotents(action, elements))]
    if action.image_is_abelian:
        return [(rho.label, k) for rho, k in abelian_idempotents(action)]
    return [(f"t{i}", k) for i, k in enumerate(s3_idempotents(action))]


def cmd_idempotents(args) -> int:
    action = _action_from_args(args)
    family = _family(action, args.image)
    report = check_family([k for _, k in family], f"idempotents of {action}")
    payload = {
        'action': repr(action),
        'idempotents': [{'label': label, 'class': k.to_json()} for label, k in family],
    }
    if not args.json:
        print(f"{action}: {len(family)} idempotents")
        for label, k in family:
            print(f"  {label}: {k.to_text()}")
    return _finish(args, [report], payload)


def cmd_specialize(args) -> int:
    action = _action_from_args(args)
    group = action.group
    s = group.element(args.at)
    family = _family(action, args.image)
    module = build_module(action, s, [k for _, k in family])
    components = [{
        'character': c.character.label,
        'multiplicity': c.multiplicity,
        'ranks': c.ranks,
    } for c in module.nonzero()]
    payload = {'action': repr(action), 'element': group.label(s), 'fixed_points': list(module.points),
               'components': components}
    lines = [f"{action} at s = {group.label(s)}: fixed points {list(module.points)}"]
    for c in components:
        lines.append(f"  {c['character']}: multiplicity {c['multiplicity']}, idempotent ranks {c['ranks']}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_char(args) -> int:
    spec = RingSpec(args.group, args.rank)
    if args.presentation:
        return _finish(args, [verify_presentation(spec)], {'ring': str(spec)})
    element = fundamental_character(spec, args.which, args.factor)
    payload = {'ring': str(spec), 'which': args.which, 'factor': args.factor,
               'character': element.char.to_text(), 'terms': element.char.to_json(),
               'dimension': element.dimension}
    lines = [element.char.to_text()]
    if element.char.rank == 1 and element.char.is_integral():
        payload['sl2_decomposition'] = decompose_sl2(element.char)
        payload['odd'] = in_odd_module(element.char)
        lines.append(f"  V(k) multiplicities: {payload['sl2_decomposition']}, odd: {payload['odd']}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_jmodel(args) -> int:
    model = load_model(args.name)
    results = []
    payload: Dict = {'model': model.to_dict()}
    if args.fiber:
        report = fiber_image_rank(model, args.fiber)
        payload['fiber'] = report.to_dict()
        if not args.json:
            print(f"{model.name} at z = {report.point}: image dimension {report.dimension} of {report.ambient}"
                  f"{', block-diagonal' if report.block_diagonal else ''} ({report.family_size} spanning elements)")
    if args.closure_test:
        results.append(closure_test(model, args.closure_test, seed=args.seed))
    if args.locus:
        classes = unique_nonisomorphism_locus(model)
        payload['locus'] = [c.to_dict() for c in classes]
        if not args.json:
            print(f"{model.name}: fiber map fails to be an isomorphism at "
                  f"{', '.join(c.equation for c in classes) or 'no point'}")
    if not (args.fiber or args.closure_test or args.locus):
        raise UsageError("jmodel needs --fiber, --closure-test or --locus")
    if results:
        return _finish(args, results, payload)
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    return EXIT_OK


def cmd_rigid(args) -> int:
    example = load_example(args.example)
    payload: Dict = {'example': example.name}
    if args.table and not args.json:
        print(example.to_frame().to_string())
    if example.Phi is not None:
        det = rigid_determinant(example)
        payload['determinant'] = det.to_text()
        payload['determinant_factored'] = det.factored_text()
        if not args.json:
            print(f"det = {det.factored_text()}")
    elif not args.json:
        print(f"{example.name} has no Phi matrix")
    if not args.check:
        if args.json:
            print(json.dumps(payload, indent=2, default=str))
        return EXIT_OK
    results = [check_structure(example)]
    if example.Phi is not None:
        results.append(vanishing_vs_poincare(example, args.weyl_type))
    return _finish(args, results, payload)


def _type_text(args) -> str:
    return f"{args.type}{args.rank}" if args.rank is not None else args.type


def cmd_poincare(args) -> int:
    text = _type_text(args)
    p = poincare_polynomial(text)
    order = int(p.evaluate(1))
    _emit(args, {'type': text, 'polynomial': p.to_text(), 'terms': p.to_json(), 'order': order},
          [f"P_{text}(q) = {p.to_text()}", f"  |W| = P(1) = {order}"])
    return EXIT_OK


def cmd_coinvariants(args) -> int:
    if args.group:
        group = standard_groups(args.group)
        images = [LatticeAuto.parse(m) for m in args.generator_matrices or []]
        actions = actions_from_generators(group, images)
        rank = images[0].rank if images else 0
        components = component_quotient(rank, group, actions)
        payload = {'group': group.name, 'rank': rank, 'components': [c.to_dict() for c in components]}
        lines = [f"{group.name} on Z^{rank}:"]
        for c in components:
            torsion = " x ".join(f"Z/{t}" for t in c.torsion) or "0"
            lines.append(f"  [{c.label}] size {c.class_size}: d = {c.d}, H = {torsion}, "
                         f"residual action of order {c.residual_order}")
        _emit(args, payload, lines)
        return EXIT_OK
    if not args.matrix:
        raise UsageError("coinvariants needs --matrix or --group with --generator-matrices")
    report = coinvariants(LatticeAuto.parse(args.matrix))
    torsion = " x ".join(f"Z/{t}" for t in report.torsion) or "0"
    _emit(args, report.to_dict(), [f"d = {report.d}, H = {torsion}, fixed rank {report.fixed_rank}"])
    return EXIT_OK


def fdeg_check(num: str, den: str, lie_type: str, rank: Optional[int] = None) -> ValidationResult:
    """Smallest k with den | P_W(q)^k, for a formal degree num/den."""
    numerator = HalfLaurent.parse(num)
    denominator = HalfLaurent.parse(den)
    if denominator.is_zero():
        raise ValueError("Denominator must be nonzero")
    text = f"{lie_type}{rank}" if rank is not None else lie_type
    result = ValidationResult(f"formal degree denominator against P_{text}")
    k = poly_divides_power(denominator, poincare_polynomial(text))
    result.data.update({'num': numerator.to_text(), 'den': denominator.to_text(), 'k': k})
    result.check(k is not None, f"{denominator} divides P_{text}^{k}",
                 f"{denominator} divides no power of P_{text} up to the configured bound")
    return result


def cmd_fdeg_check(args) -> int:
    return _finish(args, [fdeg_check(args.num, args.den, args.type, args.rank)], {})


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='jcells',
        description='Exact computations around rank one idempotents, unipotent centralizers and rigid pairings',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Centralizer of the (2,2,2) class in Sp6
  python -m jcells centralizer --type C --rank 3 --partition 2,2,2

  # Rigid determinant of the SL2 fixture, with structure checks
  python -m jcells rigid --example sl2 --check
        """,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='JSON output on stdout')
    common.add_argument('--verbose', '-v', action='store_true', help='Debug logging on stderr')
    sub = parser.add_subparsers(dest='verb', metavar='VERB')
    sub.required = True

    p = sub.add_parser('centralizer', parents=[common], help='Unipotent centralizer data')
    p.add_argument('--type', required=True, choices=['A', 'B', 'C', 'D'])
    p.add_argument('--rank', required=True, type=int)
    p.add_argument('--partition', help='Jordan type, e.g. 2,2,2 or 2,1^4')
    p.add_argument('--all', action='store_true', help='Table over all partitions')
    p.set_defaults(func=cmd_centralizer)

    for verb, helptext, func in (('idempotents', 'Rank one idempotents of a transitive set', cmd_idempotents),
                                 ('specialize', 'Decompose the fiber module at an element', cmd_specialize)):
        p = sub.add_parser(verb, parents=[common], help=helptext)
        p.add_argument('--group', required=True, help='Z4, Z2^2, S3, Z2xZ2, ...')
        p.add_argument('--stabilizer', nargs='*', help='Generators of the point stabilizer (default: trivial)')
        p.add_argument('--image', nargs='*', help='Generators of an image subgroup (S3 only)')
        if verb == 'specialize':
            p.add_argument('--at', required=True, help='Group element s')
        p.set_defaults(func=func)

    p = sub.add_parser('char', parents=[common], help='Characters of classical groups')
    p.add_argument('--group', required=True, help='Sp, SO_odd, SO_even, O_even, O_odd, Spin, Pin, GL, SL, PGL')
    p.add_argument('--rank', required=True, type=int)
    p.add_argument('--which', default='V1', help='V1.., V3+, delta+, delta-, spin, pi, det, V(k)')
    p.add_argument('--factor', default='C1', help='Factor of a disconnected group (C1 or C2)')
    p.add_argument('--presentation', action='store_true', help='Check the defining relations instead')
    p.set_defaults(func=cmd_char)

    p = sub.add_parser('jmodel', parents=[common], help='Block matrix models')
    p.add_argument('--name', required=True)
    p.add_argument('--fiber', help="Evaluation point, e.g. zeta4 or 2")
    p.add_argument('--closure-test', type=int, default=0, metavar='N')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--locus', action='store_true', help='Points where the fiber map is not an isomorphism')
    p.set_defaults(func=cmd_jmodel)

    p = sub.add_parser('rigid', parents=[common], help='Rigid pairing fixtures')
    p.add_argument('--example', required=True)
    p.add_argument('--check', action='store_true')
    p.add_argument('--table', action='store_true', help='Print B as a labeled table')
    p.add_argument('--weyl-type', help='Finite Weyl type (default: from the fixture)')
    p.set_defaults(func=cmd_rigid)

    p = sub.add_parser('poincare', parents=[common], help='Poincare polynomial of a finite Weyl group')
    p.add_argument("--type", required=True, help="A, B, C, D, a product like A1xA1, or a named group like G2")
    p.add_argument('--rank', type=int)
    p.set_defaults(func=cmd_poincare)

    p = sub.add_parser('coinvariants', parents=[common], help='Coinvariant lattices and quotient components')
    p.add_argument('--matrix', help='Rows separated by ;, e.g. "0,1;1,0"')
    p.add_argument('--group', help='Finite group acting on the lattice')
    p.add_argument('--generator-matrices', nargs='*', help='One matrix per group generator')
    p.set_defaults(func=cmd_coinvariants)

    p = sub.add_parser('fdeg-check', parents=[common], help='Formal degree denominators against P_W')
    p.add_argument('--num', default='1')
    p.add_argument('--den', required=True)
    p.add_argument('--type', required=True)
    p.add_argument('--rank', type=int)
    p.set_defaults(func=cmd_fdeg_check)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    subparser = parser._subparsers._group_actions[0].choices[args.verb]
    try:
        return args.func(args)
    except (UsageError, ValueError, FileNotFoundError) as e:
        subparser.print_help(sys.stderr)
        print(f"{args.verb}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, ArithmeticError) as e:
        logger.error(f"{args.verb} failed: {e}")
        return EXIT_FAILED


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
