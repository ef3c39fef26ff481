"""
Command-line front-end for the Frobenius manifold toolkit

Every command builds a report dictionary, prints it as JSON (or a text
banner) and exits 0 when clean, 1 when the report holds a violation and
2 on errors.
"""

import argparse
import json
import random
import re
import signal
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

try:
    from tqdm import tqdm
except ImportError:
    # Fallback if tqdm not installed
    tqdm = None

from an_saito import (
    AnChart,
    AnSaitoError,
    critical_data,
    direct_sum_verify,
    euler_checks,
    eta_jacobian,
    flat_coordinates,
    numeric_germ,
    special_point_closed_form,
    verify_special_point,
)
from config import (
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    IDENTITY_SAMPLES,
    LOG_LEVEL,
    P2_DEFAULT_DEGREE,
    P2_SEED_INVARIANT,
    REPORT_SCHEMA,
    TRUNCATION_ORDER,
)
from dgbv import (
    DGBVAlgebra,
    catalog_names,
    check_dgbv,
    conditions_check,
    identity_suite,
    integral_check,
    load_algebra_spec,
)
from germs import compare_germs, read_germ, tensor, write_germ
from graded_core import FrobeniusError
from mc_frobenius import (
    euler_check,
    export_potential,
    flatness_check,
    metric,
    normalization_check,
    potential,
    potentiality_check,
    solve_master,
    third_derivative_check,
    wdvv_check,
)
from qc_potential import (
    correlator_table,
    divisor_extend,
    divisor_identity_audit,
    identity_checks,
    p2_generate,
    p2_numbers,
    qc_wdvv_check,
    specializations,
    split_check,
)
from spectrum import (
    an_tensor_profile,
    betti,
    betti_from_profile,
    integrality,
    poincare_check,
    profile_from_dict,
)
from utils import CheckReport, dump_report, format_duration, format_report, setup_logging, write_report


EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_ERROR = 2

DGBV_ACTIONS = ('check', 'conditions', 'identities', 'integral', 'solve', 'potential', 'wdvv', 'euler')

# Flags whose values may start with a minus sign
VALUE_FLAGS = ('--coeffs', '--first', '--second', '--an')
NEGATIVE_VALUE = re.compile(r'^-[\d.]')

# Catalog entries that must fail, and what must fail in them
EXPECTED_FAILURES = {
    'eps-xi-second-order': 'gbv',
    'eps-xi-deltazero': 'B',
    'eps-xi-derivation': 'A',
    'p2-eps-xi': 'B',
}


@dataclass
class RunConfig:
    """
    Settings of one CLI invocation

    Attributes:
        command: Subcommand name
        inputs: Positional inputs (files, catalog names, indices)
        tolerance: Numeric tolerance
        order: Truncation order of formal series
        seed: Seed of every randomized sampling
        samples: Random samples per identity suite
        output_format: 'json' or 'text'
        output: Optional report file
        verbose: Debug logging
        options: Remaining subcommand flags
    """

    command: str
    inputs: List[str] = field(default_factory=list)
    tolerance: float = DEFAULT_TOLERANCE
    order: int = TRUNCATION_ORDER
    seed: int = DEFAULT_SEED
    samples: int = IDENTITY_SAMPLES
    output_format: str = 'json'
    output: Optional[Path] = None
    verbose: bool = False
    options: Dict[str, Any] = field(default_factory=dict)


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge parsed flags over the environment defaults of config.py."""
    common = {'command', 'tolerance', 'order', 'seed', 'samples', 'format', 'output', 'verbose'}
    options = {key: value for key, value in vars(args).items() if key not in common}
    inputs = []
    for key in ('action', 'algebra', 'n', 'germs'):
        value = options.pop(key, None)
        if value is None:
            continue
        inputs.extend(str(item) for item in (value if isinstance(value, list) else [value]))

    return RunConfig(
        command=args.command,
        inputs=inputs,
        tolerance=args.tolerance if args.tolerance is not None else DEFAULT_TOLERANCE,
        order=args.order if args.order is not None else TRUNCATION_ORDER,
        seed=args.seed if args.seed is not None else DEFAULT_SEED,
        samples=args.samples if args.samples is not None else IDENTITY_SAMPLES,
        output_format=args.format,
        output=args.output,
        verbose=args.verbose,
        options=options,
    )


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(token) for token in text.split(',') if token.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def parse_complex_list(text: str) -> List[complex]:
    try:
        return [complex(token.strip().replace(' ', '')) for token in text.split(',') if token.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def glue_negative_values(argv: Sequence[str]) -> List[str]:
    """Turn `--coeffs -3,0` into `--coeffs=-3,0` so argparse keeps the value."""
    glued: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in VALUE_FLAGS and i + 1 < len(argv) and NEGATIVE_VALUE.match(argv[i + 1]):
            glued.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        glued.append(token)
        i += 1
    return glued


def _special_parameters(chart: AnChart) -> Tuple[complex, complex]:
    """a_{n-1}, a_n of a chart whose lower coefficients vanish."""
    if chart.n < 2:
        raise AnSaitoError("Special points need n >= 2")
    if any(a != 0 for a in chart.coefficients[:chart.n - 2]):
        raise AnSaitoError(f"Not a special point: a_1..a_{chart.n - 2} must vanish, got {chart.coefficients}")
    return chart.coefficients[-2], chart.coefficients[-1]


def _solve_pipeline(dgbv: DGBVAlgebra, config: RunConfig):
    solution = solve_master(dgbv, order=config.order)
    g = metric(dgbv, solution)
    phi = potential(dgbv, solution)
    return solution, g, phi


# ---------------------------------------------------------------------------
# Headless property suites
# ---------------------------------------------------------------------------

def suite_betti(config: RunConfig) -> CheckReport:
    report = CheckReport('betti')
    for ns, expected in (((3, 3, 3, 3), [1, 19, 1]), ((4, 4, 4, 4, 4), [1, 101, 101, 1])):
        h = betti(ns)
        report.expect(h == expected, 'betti', f"{list(ns)}: {h}")
        report.expect(poincare_check(h), 'poincare', f"{list(ns)}: {h}")
        report.expect(betti_from_profile(an_tensor_profile(ns)) == h, 'profile_levels', f"{list(ns)}")
    report.expect(not integrality((2, 2)).integral, 'integrality', "[2, 2] has d = 2/3")
    return report


def suite_special_points(config: RunConfig) -> CheckReport:
    report = CheckReport('special_points')
    worst = 0.0
    for n in range(2, 7):
        for a_n in (0, 5):
            try:
                result = verify_special_point(n, -(n + 1), a_n, config.tolerance)
                worst = max(worst, result.max_deviation)
                report.expect(result.passed, 'closed_form', f"A_{n} at a_n = {a_n}")
            except FrobeniusError as e:
                report.expect(False, 'closed_form', f"A_{n} at a_n = {a_n}: {e}")
    report.details['max_deviation'] = worst
    return report


def suite_eta_symmetry(config: RunConfig, charts: int = 50) -> CheckReport:
    report = CheckReport('eta_symmetry')
    rng = random.Random(config.seed)
    worst = 0.0
    for _ in range(charts):
        n = rng.randint(1, 5)
        coefficients = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(n)]
        chart = AnChart(n, tuple(coefficients))
        if not critical_data(chart).tame:
            continue
        jacobian = eta_jacobian(chart)
        worst = max(worst, jacobian.asymmetry)
        report.expect(jacobian.is_symmetric(1e-8), 'eta_symmetry', f"A_{n} {coefficients}")
    report.details['max_asymmetry'] = worst
    return report


def suite_direct_sum(config: RunConfig) -> CheckReport:
    report = CheckReport('direct_sum')
    result = direct_sum_verify(AnChart(2, (-3, 0)), AnChart(2, (-12, 0)))
    report.expect(result.passed, 'direct_sum_product', "A_2(-3, 0) + A_2(-12, 0)")
    report.expect(result.germs_isomorphic, 'direct_sum_tensor', "A_2(-3, 0) + A_2(-12, 0)")
    report.details['eta_jacobian_deviation'] = result.eta_jacobian_deviation
    return report


def suite_euler(config: RunConfig) -> CheckReport:
    report = CheckReport('euler')
    rng = random.Random(config.seed)
    charts = [
        AnChart(n, tuple(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)))
        for n in range(1, 5)
    ]
    result = euler_checks(charts)
    report.violations.extend(result.violations)
    report.checked += len(result.deviations)
    report.details['deviations'] = result.deviations
    return report


def suite_catalog(config: RunConfig) -> CheckReport:
    """Axioms and identities on every catalog algebra; negative entries fail as documented."""
    report = CheckReport('catalog')
    for name in catalog_names():
        dgbv = load_algebra_spec(name)
        expected = EXPECTED_FAILURES.get(name)
        axioms = check_dgbv(dgbv)
        if expected == 'gbv':
            report.expect(not axioms.passed, 'negative_gbv', f"{name} satisfies the GBV axioms")
            continue
        report.expect(axioms.passed, 'dgbv_axioms', f"{name}: {len(axioms.violations)} violations")
        report.merge(identity_suite(dgbv, config.samples, config.seed))
        conditions = conditions_check(dgbv)
        report.expect(conditions.consistent, 'conditions_consistent', name)
        if expected is None:
            report.expect(conditions.passed, 'conditions', f"{name}: A={conditions.A} B={conditions.B}")
        else:
            report.expect(not getattr(conditions, expected), 'negative_conditions',
                          f"{name}: condition {expected} holds")
    return report


def suite_master(config: RunConfig) -> CheckReport:
    """Master equation, potential and WDVV on every catalog algebra satisfying (A) and (B)."""
    report = CheckReport('master')
    for name in catalog_names():
        if name in EXPECTED_FAILURES:
            continue
        dgbv = load_algebra_spec(name)
        solution, g, phi = _solve_pipeline(dgbv, config)
        report.merge(normalization_check(solution))
        report.merge(wdvv_check(phi, g))
        report.merge(third_derivative_check(dgbv, solution, phi, seed=config.seed))
        report.merge(potentiality_check(solution, g, phi))
        report.merge(euler_check(dgbv, solution, phi))
    return report


def suite_p2(config: RunConfig) -> CheckReport:
    report = CheckReport('p2')
    qc = p2_generate(5, P2_SEED_INVARIANT)
    numbers = p2_numbers(qc)
    report.expect(numbers == [1, 1, 12, 620, 87304], 'p2_numbers', f"{numbers}")
    report.merge(qc_wdvv_check(qc))
    report.merge(divisor_identity_audit(correlator_table(qc), qc))
    report.merge(split_check(qc))
    report.merge(identity_checks(qc))
    return report


SUITES: Tuple[Tuple[str, Callable[[RunConfig], CheckReport]], ...] = (
    ('betti', suite_betti),
    ('special_points', suite_special_points),
    ('eta_symmetry', suite_eta_symmetry),
    ('direct_sum', suite_direct_sum),
    ('euler', suite_euler),
    ('catalog', suite_catalog),
    ('master', suite_master),
    ('p2', suite_p2),
)


# ---------------------------------------------------------------------------
# Orchestrator
# ---------------------------------------------------------------------------

class ReportRunner:
    """Runs one command and renders its report"""

    def __init__(self, config: RunConfig):
        """
        Initialize runner

        Args:
            config: Settings of this invocation
        """
        self.config = config

        # Setup logging
        self.logger = setup_logging(level='DEBUG' if config.verbose else LOG_LEVEL)

        # Statistics
        self.stats = {
            'checks': 0,
            'violations': 0,
            'start_time': None,
        }

        # Graceful shutdown between suites
        self.shutdown_requested = False
        signal.signal(signal.SIGINT, self._request_shutdown)
        signal.signal(signal.SIGTERM, self._request_shutdown)

        self.handlers: Dict[str, Callable[[dict], None]] = {
            'spectrum': self.cmd_spectrum,
            'an': self.cmd_an,
            'tensor': self.cmd_tensor,
            'sum-verify': self.cmd_sum_verify,
            'dgbv': self.cmd_dgbv,
            'p2': self.cmd_p2,
            'suite': self.cmd_suite,
        }

    def _request_shutdown(self, signum, frame):
        """Handle shutdown signal"""
        self.logger.warning("Shutdown requested, finishing current suite...")
        self.shutdown_requested = True

    def record(self, report: dict, name: str, outcome) -> None:
        """Attach a checker outcome (anything with .passed) to the report."""
        report.setdefault('checks', {})[name] = outcome
        self.stats['checks'] += 1
        if not outcome.passed:
            self.stats['violations'] += 1
            self.logger.warning(f"{name}: check failed")

    def cmd_spectrum(self, report: dict) -> None:
        options = self.config.options
        if not options.get('an') and not options.get('profile'):
            raise FrobeniusError("spectrum needs --an or --profile")
        if options.get('an'):
            ns = options['an']
            result = integrality(ns)
            h = betti(ns)
            report['an'] = {
                'ns': ns,
                'd': result.d,
                'integral': result.integral,
                'profile': an_tensor_profile(ns),
                'betti': h,
                'poincare': poincare_check(h),
            }
            if options.get('require_integral'):
                check = CheckReport('integrality')
                check.expect(result.integral, 'integral_d', f"{ns}: d = {result.d}")
                self.record(report, 'integrality', check)
        profiles = []
        for path in options.get('profile') or []:
            with open(path, 'r', encoding='utf-8') as f:
                try:
                    profile = profile_from_dict(json.load(f))
                except json.JSONDecodeError as e:
                    raise FrobeniusError(f"{path}: invalid JSON ({e})") from e
            h = betti_from_profile(profile)
            profiles.append({'file': str(path), 'profile': profile, 'betti': h, 'poincare': poincare_check(h)})
            if options.get('require_integral'):
                check = CheckReport('integrality')
                check.expect(profile.d.denominator == 1, 'integral_d', f"{path}: d = {profile.d}")
                self.record(report, f"integrality:{path}", check)
        if profiles:
            report['profiles'] = profiles

    def cmd_an(self, report: dict) -> None:
        options = self.config.options
        tol = self.config.tolerance
        n = int(self.config.inputs[0])
        coefficients = options.get('coeffs') or [0j] * n
        chart = AnChart(n, tuple(coefficients))
        report['chart'] = chart

        data = critical_data(chart, tol)
        report['critical'] = data
        if data.tame:
            jacobian = eta_jacobian(chart, tol)
            report['eta_jacobian'] = jacobian
            check = CheckReport('eta_symmetry')
            check.expect(jacobian.is_symmetric(tol * 10), 'eta_symmetry', f"asymmetry {jacobian.asymmetry:.3e}")
            self.record(report, 'eta_symmetry', check)
        else:
            self.logger.warning(f"A_{n} chart {chart.coefficients} is not tame")

        germ = None
        if options.get('special'):
            a_nm1, a_n = _special_parameters(chart)
            germ = special_point_closed_form(n, a_nm1, a_n)
            report['special'] = germ
        if options.get('verify_closed_form'):
            a_nm1, a_n = _special_parameters(chart)
            self.record(report, 'closed_form', verify_special_point(n, a_nm1, a_n, tol))
        if options.get('flat'):
            report['flat_coordinates'] = flat_coordinates(chart, self.config.order)
        if options.get('euler'):
            self.record(report, 'euler', euler_checks(chart))
        if options.get('germ_out'):
            germ = germ if germ is not None else numeric_germ(chart, tol)
            write_germ(germ, options['germ_out'])
            report['germ_out'] = str(options['germ_out'])

    def cmd_tensor(self, report: dict) -> None:
        options = self.config.options
        tol = self.config.tolerance
        germs = [read_germ(Path(path)) for path in self.config.inputs]
        if not germs:
            raise FrobeniusError("tensor needs at least one germ file")
        product = germs[0]
        for germ in germs[1:]:
            product = tensor(product, germ, tol)
        report['germ'] = product
        report['reciprocity_defect'] = product.reciprocity_defect()
        if options.get('compare'):
            comparison = compare_germs(product, read_germ(options['compare']), tol)
            check = CheckReport('comparison', details={'comparison': comparison})
            check.expect(comparison.isomorphic, 'isomorphic', f"{options['compare']}")
            self.record(report, 'comparison', check)
        if options.get('germ_out'):
            write_germ(product, options['germ_out'])
            report['germ_out'] = str(options['germ_out'])

    def cmd_sum_verify(self, report: dict) -> None:
        options = self.config.options
        first, second = options['first'], options['second']
        chart_a = AnChart(len(first), tuple(first))
        chart_b = AnChart(len(second), tuple(second))
        result = direct_sum_verify(chart_a, chart_b, self.config.tolerance)
        report['charts'] = [chart_a, chart_b]
        self.record(report, 'direct_sum', result)
        if options.get('germ_out'):
            write_germ(result.sum_germ, options['germ_out'])
            report['germ_out'] = str(options['germ_out'])

    def cmd_dgbv(self, report: dict) -> None:
        action, name = self.config.inputs[0], self.config.inputs[1]
        dgbv = load_algebra_spec(name)
        report['algebra'] = dgbv.name or name
        report['action'] = action

        if action == 'check':
            self.record(report, 'dgbv_axioms', check_dgbv(dgbv))
            return
        if action == 'conditions':
            self.record(report, 'conditions', conditions_check(dgbv))
            return
        if action == 'identities':
            self.record(report, 'identities', identity_suite(dgbv, self.config.samples, self.config.seed))
            return
        if action == 'integral':
            self.record(report, 'integral', integral_check(dgbv))
            return

        if action == 'solve':
            solution = solve_master(dgbv, order=self.config.order)
            report['solution'] = solution
            self.record(report, 'normalization', normalization_check(solution))
            return

        solution, g, phi = _solve_pipeline(dgbv, self.config)
        report['metric'] = g
        report['potential'] = export_potential(phi)
        if action == 'potential':
            self.record(report, 'normalization', normalization_check(solution))
            self.record(report, 'wdvv', wdvv_check(phi, g))
            self.record(report, 'third_derivatives',
                        third_derivative_check(dgbv, solution, phi, seed=self.config.seed))
        elif action == 'wdvv':
            self.record(report, 'wdvv', wdvv_check(phi, g))
            self.record(report, 'potentiality', potentiality_check(solution, g, phi))
            self.record(report, 'flatness', flatness_check(solution))
        elif action == 'euler':
            self.record(report, 'euler', euler_check(dgbv, solution, phi))

    def cmd_p2(self, report: dict) -> None:
        options = self.config.options
        qc = p2_generate(options['degree'], P2_SEED_INVARIANT)
        report['numbers'] = p2_numbers(qc)
        report['potential'] = qc
        self.record(report, 'wdvv', qc_wdvv_check(qc))
        self.record(report, 'split', split_check(qc))
        self.record(report, 'identity', identity_checks(qc))
        products = specializations(qc)
        report['small_product'] = products.small
        self.record(report, 'specializations', products.report)
        if options.get('audit'):
            table = correlator_table(qc)
            self.record(report, 'divisor_identity', divisor_identity_audit(table, qc))
            self.record(report, 'divisor_extension', divisor_extend(table, qc).report)

    def cmd_suite(self, report: dict) -> None:
        selected = self.config.options.get('only') or [name for name, _ in SUITES]
        unknown = sorted(set(selected) - {name for name, _ in SUITES})
        if unknown:
            raise FrobeniusError(f"Unknown suites: {unknown}")
        suites = [(name, runner) for name, runner in SUITES if name in selected]

        if tqdm:
            iterator = tqdm(suites, desc="Running suites", unit="suite", file=sys.stderr)
        else:
            iterator = suites

        for name, runner in iterator:
            if self.shutdown_requested:
                self.logger.warning("Shutdown requested, stopping")
                report['interrupted'] = True
                break
            self.logger.info(f"Suite {name}")
            self.record(report, name, runner(self.config))

    def run(self) -> int:
        """Execute the command, emit the report and return the exit code"""
        self.stats['start_time'] = time.time()
        report: dict = {'schema': REPORT_SCHEMA, 'command': self.config.command}
        exit_code = EXIT_OK

        try:
            self.handlers[self.config.command](report)
            if self.stats['violations']:
                report['status'] = 'violation'
                exit_code = EXIT_VIOLATION
            else:
                report['status'] = 'ok'

        except (FrobeniusError, OSError) as e:
            self.logger.error(f"{type(e).__name__}: {e}", exc_info=True)
            report = {
                'schema': REPORT_SCHEMA,
                'command': self.config.command,
                'status': 'error',
                'error': {'type': type(e).__name__, 'message': str(e)},
            }
            exit_code = EXIT_ERROR

        finally:
            self.emit(report)
            self.cleanup(report)

        return exit_code

    def emit(self, report: dict) -> None:
        if self.config.output_format == 'text':
            print(format_report(report))
        else:
            print(dump_report(report))
        if self.config.output:
            write_report(report, self.config.output)
            self.logger.info(f"Report written to {self.config.output}")

    def cleanup(self, report: dict):
        """Log summary"""
        elapsed = time.time() - self.stats['start_time']

        self.logger.info("=" * 60)
        self.logger.info(f"{self.config.command.upper()} FINISHED: {report.get('status', 'unknown')}")
        self.logger.info("=" * 60)
        self.logger.info(f"Checks: {self.stats['checks']}")
        self.logger.info(f"Failed checks: {self.stats['violations']}")
        self.logger.info(f"Elapsed time: {format_duration(elapsed)}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tolerance', type=float, default=None,
                        help='Numeric tolerance (default: FROBENIUS_TOLERANCE or 1e-9)')
    common.add_argument('--order', type=int, default=None,
                        help='Truncation order of formal series (default: FROBENIUS_TRUNCATION_ORDER or 6)')
    common.add_argument('--seed', type=int, default=None,
                        help='Seed for randomized sampling (default: FROBENIUS_SEED or 0)')
    common.add_argument('--samples', type=int, default=None,
                        help='Random samples per identity suite (default: FROBENIUS_IDENTITY_SAMPLES or 100)')
    common.add_argument('--format', choices=('json', 'text'), default='json',
                        help='Report format on stdout')
    common.add_argument('--output', type=Path, default=None,
                        help='Also write the JSON report to this file')
    common.add_argument('--verbose', action='store_true',
                        help='Debug logging')

    parser = argparse.ArgumentParser(
        description='Frobenius manifold toolkit',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py spectrum --an 3,3,3,3
  python main.py spectrum --an 2,2 --require-integral
  python main.py an 2 --coeffs -3,0 --special --germ-out output/a2.json
  python main.py an 3 --coeffs 0,-4,0 --verify-closed-form
  python main.py sum-verify --first -3,0 --second -12,0
  python main.py tensor output/a2.json output/a2b.json --compare output/sum.json
  python main.py dgbv potential p2-trivial
  python main.py p2 --degree 4 --audit
  python main.py suite --format text
        """
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    spectrum_parser = subparsers.add_parser('spectrum', parents=[common], help='Spectra and Betti numbers')
    spectrum_parser.add_argument('--an', type=parse_int_list, default=None,
                                 help='Comma-separated n_k of A_n1 x ... x A_nN')
    spectrum_parser.add_argument('--profile', type=Path, action='append', default=None,
                                 help='JSON profile file {"d", "entries"} (repeatable)')
    spectrum_parser.add_argument('--require-integral', action='store_true',
                                 help='Fail unless d is an integer')

    an_parser = subparsers.add_parser('an', parents=[common], help='A_n Saito framework at one chart')
    an_parser.add_argument('n', type=int, help='Index n of A_n')
    an_parser.add_argument('--coeffs', type=parse_complex_list, default=None,
                           help='Comma-separated a_1..a_n (default: all zero)')
    an_parser.add_argument('--special', action='store_true',
                           help='Closed-form special coordinates (a_1..a_{n-2} must vanish)')
    an_parser.add_argument('--verify-closed-form', action='store_true',
                           help='Compare the numeric germ with the closed forms')
    an_parser.add_argument('--flat', action='store_true', help='Flat coordinates')
    an_parser.add_argument('--euler', action='store_true', help='Finite-difference Euler field checks')
    an_parser.add_argument('--germ-out', type=Path, default=None, help='Write the germ to this file')

    tensor_parser = subparsers.add_parser('tensor', parents=[common], help='Tensor product of germ files')
    tensor_parser.add_argument('germs', nargs='+', help='Germ files')
    tensor_parser.add_argument('--compare', type=Path, default=None,
                               help='Germ file to compare the product with')
    tensor_parser.add_argument('--germ-out', type=Path, default=None, help='Write the product germ')

    sum_parser = subparsers.add_parser('sum-verify', parents=[common],
                                       help='Direct sum of two A_n charts against the tensor product')
    sum_parser.add_argument('--first', type=parse_complex_list, required=True,
                            help='Coefficients of the first chart')
    sum_parser.add_argument('--second', type=parse_complex_list, required=True,
                            help='Coefficients of the second chart')
    sum_parser.add_argument('--germ-out', type=Path, default=None, help='Write the direct-sum germ')

    dgbv_parser = subparsers.add_parser('dgbv', parents=[common], help='dGBV algebra pipelines')
    dgbv_parser.add_argument('action', choices=DGBV_ACTIONS)
    dgbv_parser.add_argument('algebra', help='Catalog name or algebra-spec file')

    p2_parser = subparsers.add_parser('p2', parents=[common], help='Projective plane potential from associativity')
    p2_parser.add_argument('--degree', type=int, default=P2_DEFAULT_DEGREE,
                           help=f'Maximal curve degree (default: {P2_DEFAULT_DEGREE})')
    p2_parser.add_argument('--audit', action='store_true', help='Audit the divisor relation on the table')

    suite_parser = subparsers.add_parser('suite', parents=[common], help='Headless property suites')
    suite_parser.add_argument('--only', action='append', default=None,
                              help=f"Run only these suites ({', '.join(name for name, _ in SUITES)})")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point"""
    parser = build_parser()
    args = parser.parse_args(glue_negative_values(sys.argv[1:] if argv is None else argv))
    runner = ReportRunner(load_config(args))
    return runner.run()


if __name__ == '__main__':
    sys.exit(main())
