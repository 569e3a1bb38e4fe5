"""
Property suites and the randomized differential driver.

Every suite takes a case and returns None when the property holds, or a
message describing the violation. ResourceLimitError raised by a suite is a
guard trip: counted on its own, never as a failure.
"""

import logging
import random
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field

from msou.config import Config
from msou.errors import MsouError, NotUniqueError, ResourceLimitError
from msou.services.compose import bottom_up_type, context_type
from msou.services.decompose import build_omega, check_thm2, check_thm1, omega_holds
from msou.services.formula import Formula, Unbound
from msou.services.oracle import Oracle
from msou.services.phtypes import Pair, PhType, Quant
from msou.services.syntax import (
    parse_formula,
    parse_tree,
    parse_valuation,
    print_formula,
    print_tree,
    print_valuation,
)
from msou.services.tree import EMPTY_VALUATION, Valuation, plug, restrict_valuation
from msou.services.typespace import reachable_types, synth_psi, synth_psi_empty, tv
from msou.utils.generators import (
    all_trees,
    all_valuations,
    random_context,
    random_formula,
    random_tree,
    random_valuation,
)
from msou.utils.shrink import Case, shrink

logger = logging.getLogger(__name__)

Suite = Callable[[Case, Config, int], Optional[str]]


def check_composition(case: Case, config: Config, seed: int) -> Optional[str]:
    """Folding comp bottom-up gives the oracle's type."""
    folded = bottom_up_type(case.formula, case.tree, case.valuation)
    direct = Oracle(case.tree).type_of(case.formula, case.valuation)
    if folded != direct:
        return f"bottom-up type {folded} differs from direct type {direct}"
    return None


def check_truth_value(case: Case, config: Config, seed: int) -> Optional[str]:
    """The truth value read off the type is the truth value of the formula."""
    oracle = Oracle(case.tree)
    holds = oracle.holds(case.formula, case.valuation)
    extracted = tv(case.formula, oracle.type_of(case.formula, case.valuation))
    if holds != extracted:
        return f"tv gives {extracted}, evaluation gives {holds}"
    return None


def _quants(t: PhType):
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Pair):
            stack.extend((node.lhs, node.rhs))
        elif isinstance(node, Quant):
            yield node
            stack.extend(node.exists + node.unbounded)


def check_finite_unbounded(case: Case, config: Config, seed: int) -> Optional[str]:
    """On finite trees U never holds and no type has an unbounded component."""
    if isinstance(case.formula, Unbound) and Oracle(case.tree).holds(case.formula, case.valuation):
        return "U-formula holds on a finite tree"
    folded = bottom_up_type(case.formula, case.tree, case.valuation)
    for q in _quants(folded):
        if q.unbounded:
            return f"bottom-up type {folded} has a nonempty unbounded component"
    return None


def check_roundtrip(case: Case, config: Config, seed: int) -> Optional[str]:
    text = print_formula(case.formula)
    if parse_formula(text) != case.formula:
        return f"formula does not survive printing: {text}"
    if parse_tree(print_tree(case.tree)) != case.tree:
        return f"tree does not survive printing: {print_tree(case.tree)}"
    if parse_valuation(print_valuation(case.valuation)) != case.valuation:
        return "valuation does not survive printing"
    return None


def check_context(case: Case, config: Config, seed: int) -> Optional[str]:
    """Typing a plugged tree equals typing the context with the subtree's type assumed."""
    cut = random_context(random.Random(seed), case.tree)
    if cut is None:
        return None
    context, hole_at, removed = cut
    if plug(context, {1: removed}) != case.tree:
        return "plugging the removed subtree back does not give the tree"
    outside = Valuation(
        {
            var: [a for a in nodes if a[: len(hole_at)] != hole_at]
            for var, nodes in case.valuation.items()
        }
    )
    assumed = bottom_up_type(case.formula, removed, restrict_valuation(case.valuation, hole_at))
    whole = bottom_up_type(case.formula, case.tree, case.valuation)
    with_hole = context_type(case.formula, context, outside, {1: assumed})
    if whole != with_hole:
        return f"plugged type {whole} differs from context type {with_hole}"
    return None


@lru_cache(maxsize=128)
def _omega(formula: Formula, config: Config):
    return build_omega(formula, config)


def check_decomposition(case: Case, config: Config, seed: int) -> Optional[str]:
    omega = _omega(case.formula, config)
    for entry in omega.entries:
        for f in entry.formulas:
            if not f.fv <= case.formula.fv:
                return f"decomposition formula {f} has free variables outside the formula's"
    report = check_thm1(case.formula, case.tree, case.valuation, omega)
    if report.lhs != report.rhs:
        return f"formula gives {report.lhs}, decomposition gives {report.rhs}"
    if report.rhs and not omega_holds(omega.entries[report.witness_index], case.tree, case.valuation):
        return "reported witness tuple does not hold"
    return None


def check_relabeling(case: Case, config: Config, seed: int) -> Optional[str]:
    try:
        report = check_thm2(case.formula, case.tree, case.valuation, config)
    except NotUniqueError as e:
        return str(e)
    if not report.is_mso:
        return "synthesized formula uses U"
    if not report.fv_contained:
        return "synthesized formula has free variables outside the formula's"
    if report.lhs != report.rhs:
        return f"formula gives {report.lhs}, relabeled check gives {report.rhs}"
    return None


SUITES: Dict[str, Suite] = {
    "composition": check_composition,
    "truth_value": check_truth_value,
    "finite_unbounded": check_finite_unbounded,
    "roundtrip": check_roundtrip,
    "context": check_context,
    "decomposition": check_decomposition,
    "relabeling": check_relabeling,
}


class SuiteStats(BaseModel):
    passed: int = 0
    failed: int = 0
    guard_trips: int = 0


class Counterexample(BaseModel):
    suite: str
    case: int
    formula: str
    tree: str
    valuation: str
    message: str


class FuzzSummary(BaseModel):
    seed: int
    cases: int
    failures: int = 0
    guard_trips: int = 0
    suites: Dict[str, SuiteStats] = Field(default_factory=dict)
    counterexamples: List[Counterexample] = Field(default_factory=list)


def generate_cases(
    seed: int, cases: int, config: Config, max_nodes: int = 6, max_qdepth: int = 2, max_size: int = 10
):
    """Yield (index, case, case seed); identical seeds give identical streams."""
    rng = random.Random(seed)
    for index in range(cases):
        formula = random_formula(rng, config, max_qdepth=max_qdepth, max_size=max_size)
        tree = random_tree(rng, config, max_nodes=max_nodes)
        valuation = random_valuation(rng, tree, formula.fv_order)
        yield index, Case(formula, tree, valuation), rng.randrange(2 ** 32)


def _run_suite(suite: Suite, case: Case, config: Config, seed: int) -> Optional[str]:
    try:
        return suite(case, config, seed)
    except ResourceLimitError:
        raise
    except MsouError as e:
        return f"{type(e).__name__}: {e}"


def run_fuzz(
    seed: int = 42,
    cases: int = 100,
    config: Optional[Config] = None,
    max_nodes: int = 6,
    max_qdepth: int = 2,
    suites: Optional[Sequence[str]] = None,
    shrink_failures: bool = True,
) -> FuzzSummary:
    """
    Run the property suites on a seeded stream of random cases.

    Args:
        seed: seed of the case stream
        cases: number of cases
        config: alphabet and r_max of the generated trees
        max_nodes: largest generated tree
        max_qdepth: deepest quantifier nesting of generated formulas
        suites: names from SUITES, all by default
        shrink_failures: minimise counterexamples before reporting them

    Returns:
        Pass, failure and guard-trip counts per suite, with counterexamples
    """
    config = config or Config()
    names = list(suites or SUITES)
    summary = FuzzSummary(seed=seed, cases=cases, suites={name: SuiteStats() for name in names})

    for index, case, case_seed in generate_cases(seed, cases, config, max_nodes, max_qdepth):
        for name in names:
            suite = SUITES[name]
            stats = summary.suites[name]
            try:
                message = _run_suite(suite, case, config, case_seed)
            except ResourceLimitError as e:
                logger.warning(f"Guard trip in {name} on case {index}: {e}")
                stats.guard_trips += 1
                summary.guard_trips += 1
                continue
            if message is None:
                stats.passed += 1
                continue

            stats.failed += 1
            summary.failures += 1
            logger.error(f"Suite {name} failed on case {index}: {message}")
            reported = case
            if shrink_failures:
                reported = shrink(
                    case, lambda c: _run_suite(suite, c, config, case_seed) is not None
                )
                message = _run_suite(suite, reported, config, case_seed) or message
            summary.counterexamples.append(
                Counterexample(
                    suite=name,
                    case=index,
                    formula=print_formula(reported.formula),
                    tree=print_tree(reported.tree),
                    valuation=print_valuation(reported.valuation),
                    message=message,
                )
            )

    logger.info(
        f"Fuzzed {cases} cases: {summary.failures} failures, {summary.guard_trips} guard trips"
    )
    return summary


def check_synth_exhaustive(
    formula: Formula, config: Config, max_nodes: int = 4, empty_valuation: bool = False
) -> List[str]:
    """
    Over all trees with at most max_nodes nodes (and all valuations of the
    free variables, unless empty_valuation), exactly one reachable type's
    defining formula holds, and it is the oracle's type.

    Returns:
        Descriptions of the violations, empty when there are none
    """
    space = reachable_types(formula, config)
    if empty_valuation:
        defining = {t: synth_psi_empty(formula, t, config) for t in space.reachable}
    else:
        defining = {t: synth_psi(formula, t, config) for t in space.reachable}

    problems = []
    for tree in all_trees(config, max_nodes):
        oracle = Oracle(tree)
        valuations = [EMPTY_VALUATION] if empty_valuation else all_valuations(tree, formula.fv_order)
        for valuation in valuations:
            actual = oracle.type_of(formula, valuation)
            check_on = EMPTY_VALUATION if empty_valuation else valuation
            matching = [t for t, psi in defining.items() if oracle.holds(psi, check_on)]
            if matching != [actual]:
                problems.append(
                    f"{print_tree(tree)} / {print_valuation(valuation) or 'empty'}: "
                    f"type {actual}, defining formulas hold for {[str(t) for t in matching]}"
                )
    return problems
