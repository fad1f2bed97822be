#!/usr/bin/env python3
"""
Fixture verification for jcells

Re-derives the shipped data and checks it against the library:
1. Rigid pairing fixtures: block structure, determinants, vanishing against P_W
2. a-values recorded in the SO7 fixture against the centralizer formula
3. Poincare polynomials of the shipped Weyl groups
4. Block matrix models: fiber dimensions at generic and special points
5. Defining relations of the O_2n and Pin_2n representation rings

Usage:
    python scripts/verify_fixtures.py
    python scripts/verify_fixtures.py --sections rigid models
"""

import sys
import argparse
import logging
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from jcells.classgrp import LieType, Partition, a_value, load_weyl_groups, poincare_polynomial  # noqa: E402
from jcells.config import LOG_LEVEL  # noqa: E402
from jcells.jmodels import available_models, fiber_image_rank, load_model  # noqa: E402
from jcells.report import Colors, ValidationResult, summarize  # noqa: E402
from jcells.repring import RingSpec, verify_presentation  # noqa: E402
from jcells.rigid import SHIPPED_EXAMPLES, check_structure, load_example, vanishing_vs_poincare  # noqa: E402

logger = logging.getLogger(__name__)

SECTIONS = ['rigid', 'a-values', 'poincare', 'models', 'presentations']

# |W| for the groups the fixtures refer to
EXPECTED_WEYL_ORDERS = {'A1': 2, 'B3': 48, 'C3': 48, 'G2': 12}

# Fiber dimensions at a generic point and at z = i
EXPECTED_FIBERS = {
    'sl2-j0': {'2': 4, 'zeta4': 2},
    'bdd-sp6': {'2': 144, 'zeta4': 90},
    'pgl2-j0': {'2': 4, 'zeta4': 4},
}


def check_rigid() -> list:
    results = []
    for name in SHIPPED_EXAMPLES:
        example = load_example(name)
        results.append(check_structure(example))
        if example.Phi is not None:
            results.append(vanishing_vs_poincare(example))
    return results


def check_so7_a_values() -> ValidationResult:
    """Cells of the SO7 fixture are unipotent classes of Sp6."""
    result = ValidationResult("a-values of the SO7 fixture")
    example = load_example('so7')
    dual = LieType('C', 3)
    for block in example.blocks:
        expected = a_value(dual, Partition.parse(block.cell))
        result.check(expected == block.a,
                     f"a{block.cell} = {block.a}",
                     f"a{block.cell}: fixture says {block.a}, centralizer formula gives {expected}")
    return result


def check_poincare() -> ValidationResult:
    result = ValidationResult("Poincare polynomials")
    names = list(EXPECTED_WEYL_ORDERS)
    for name in load_weyl_groups():
        if name not in names:
            result.add_warning(f"Weyl group {name} has no expected order recorded")
            names.append(name)
    for name in names:
        order = int(poincare_polynomial(name).evaluate(1))
        expected = EXPECTED_WEYL_ORDERS.get(name)
        if expected is not None:
            result.check(order == expected, f"|W({name})| = {order}", f"|W({name})| = {order}, expected {expected}")
    return result


def check_models() -> ValidationResult:
    result = ValidationResult("block matrix model fibers")
    for name in available_models():
        expected = EXPECTED_FIBERS.get(name)
        if expected is None:
            result.add_warning(f"Model {name} has no expected fiber dimensions recorded")
            continue
        model = load_model(name)
        for point, dimension in expected.items():
            report = fiber_image_rank(model, point)
            result.check(report.dimension == dimension,
                         f"{name} at {point}: {report.dimension} of {report.ambient}",
                         f"{name} at {point}: dimension {report.dimension}, expected {dimension}")
    return result


def check_presentations() -> list:
    return [verify_presentation(RingSpec(family, n)) for family in ('O_even', 'Pin') for n in (1, 2)]


def main():
    parser = argparse.ArgumentParser(description='Verify the shipped jcells fixtures')
    parser.add_argument('--sections', nargs='+', choices=SECTIONS, help='Sections to verify (default: all)')
    args = parser.parse_args()

    logging.basicConfig(level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
                        format='%(asctime)s - %(levelname)s - %(message)s')
    sections = args.sections or SECTIONS

    print("=" * 80)
    print(f"{Colors.BOLD}jcells Fixture Verification{Colors.END}")
    print("=" * 80)
    print(f"\nSections: {', '.join(sections)}\n")

    all_results = []
    if 'rigid' in sections:
        all_results.extend(check_rigid())
    if 'a-values' in sections:
        all_results.append(check_so7_a_values())
    if 'poincare' in sections:
        all_results.append(check_poincare())
    if 'models' in sections:
        all_results.append(check_models())
    if 'presentations' in sections:
        all_results.extend(check_presentations())

    for result in all_results:
        result.print_results()

    sys.exit(summarize(all_results))


if __name__ == "__main__":
    main()
