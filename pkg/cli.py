"""
Command-line interface for the fidelity-witness toolkit.

Exit codes: 0 success, 2 configuration error, 3 numeric or grid error,
4 insufficient samples.
"""

import argparse
import sys

from src.config import configure_logging, get_config
from src.errors import WitnessError
from src.experiment import load_experiment
from src.pipeline import BenchmarkPipeline, recompute_witness
from src.storage import ReportStore, dumps


RUN_COMMANDS = {
    'certify-state': 'run_certify_state',
    'benchmark-gaussian': 'run_benchmark_gaussian',
    'benchmark-amplifier': 'run_benchmark_amplifier',
    'benchmark-cubic': 'run_benchmark_cubic',
}


def print_report(report):
    """Print a run report in readable format"""
    print(f"\n{'='*60}")
    print(f"Witness report: {report.scenario.value} (seed {report.seed})")
    print(f"{'='*60}")
    if report.estimators:
        print(f"\nWitness estimate: {report.witness:.6f}")
        print(f"  epsilon = {report.epsilon}, delta = {report.delta}, "
              f"variance mode = {report.variance_mode}")
        print(f"\nEstimators:")
        for name, result in report.estimators.items():
            print(f"  {name}: {result.estimate:.6f}  "
                  f"({result.B} batches x {result.per_batch_size} shots)")
        print(f"\nShots used: {report.shots} (pilot: {report.pilot_shots})")
    if report.budget:
        print(f"Planner {report.budget.label}: {report.budget.N_total}")
    if report.oracle:
        print(f"\nExact witness W: {report.oracle['W']:.6f}")
        print(f"Exact fidelity F: {report.oracle['F']:.6f}")
        print(f"Gap F - W: {report.oracle['gap']:.6f}")
    if report.timing:
        print(f"\nWall time: {report.timing['wall_seconds']:.2f} s")


def print_budget(budget):
    """Print a planner budget in readable format"""
    print(f"\n{'='*60}")
    print(f"Sample budget: {budget.scenario.value} ({budget.label})")
    print(f"{'='*60}")
    print(f"epsilon = {budget.epsilon}, delta = {budget.delta}, m = {budget.m}, s = {budget.s:.6f}")
    for name in ('E_max_prep', 'E_max_target', 'Gamma_max', 'r_max', 'q_max', 'S_max', 'S_prime_max'):
        value = getattr(budget, name)
        if value is not None:
            print(f"  {name}: {value:.6g}")
    print(f"\nBatches: {budget.batches}")
    for name, bound in budget.variance_bounds.items():
        print(f"  E({name}^2) bound: {bound:.6g}")
    if budget.N_chi or budget.N_X:
        print(f"N_chi: {budget.N_chi}")
        print(f"N_X: {budget.N_X}")
    print(f"N_total: {budget.N_total}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Continuous-variable fidelity witness benchmarking CLI'
    )
    subparsers = parser.add_subparsers(dest='command', help='Command to execute')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', required=True, help='Experiment JSON file')
    common.add_argument('--seed', type=int, help='Override the master seed')
    common.add_argument('--out', help='Output directory for reports')
    common.add_argument('--threads', type=int, help='Worker threads for batch sampling')
    common.add_argument('--format', choices=['text', 'json'], default='text', help='Output format')
    common.add_argument('--verbose', action='store_true', help='Debug logging')

    subparsers.add_parser('certify-state', parents=[common], help='Gaussian state witness')
    subparsers.add_parser('benchmark-gaussian', parents=[common], help='Gaussian channel witness')
    subparsers.add_parser('benchmark-amplifier', parents=[common], help='Coherent-state amplifier witness')
    subparsers.add_parser('benchmark-cubic', parents=[common], help='Cubic-phase gate witness')
    subparsers.add_parser('plan', parents=[common], help='Upper-bound sample budget')
    subparsers.add_parser('oracle', parents=[common], help='Exact witness and fidelity')

    recompute_parser = subparsers.add_parser('recompute', help='Recompute a witness from a stored report')
    recompute_parser.add_argument('report', help='Report JSON file')
    return parser


def run_command(args) -> int:
    if args.command == 'recompute':
        report = ReportStore.load_report(args.report)
        value = recompute_witness(report)
        print(f"Recomputed witness: {value:.6f} (stored: {report['witness']:.6f})")
        return 0

    cfg = load_experiment(args.config).with_overrides(
        seed=args.seed, output_dir=args.out, threads=args.threads
    )
    storage = ReportStore(cfg.output_dir)
    pipeline = BenchmarkPipeline(storage, verbose=args.format == 'text')

    if args.command == 'plan':
        budget = pipeline.run_plan(cfg)
        if args.format == 'json':
            print(dumps(budget.to_dict()), end='')
        else:
            print_budget(budget)
        return 0

    if args.command == 'oracle':
        report = pipeline.run_oracle(cfg)
    else:
        report = getattr(pipeline, RUN_COMMANDS[args.command])(cfg)
    if args.format == 'json':
        print(dumps(report.to_dict()), end='')
    else:
        print_report(report)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 0

    try:
        configure_logging(get_config(), verbose=getattr(args, 'verbose', False))
        return run_command(args)
    except WitnessError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyError as exc:
        print(f"Error: malformed report: {exc}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
