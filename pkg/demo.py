"""
Demo script to show the toolkit working end-to-end.
Runs the exact oracle and a sampled witness for one configuration of each
scenario, then prints the planner budget for comparison.
"""

from pathlib import Path

from src.config import configure_logging, get_config
from src.experiment import load_experiment
from src.pipeline import BenchmarkPipeline
from src.storage import ReportStore

CONFIG_DIR = Path(__file__).parent / "configs"

DEMO_CONFIGS = [
    "state_thermal.json",
    "channel_loss.json",
    "amplifier_noisy.json",
    "cubic.json",
]


def main():
    print("="*70)
    print("Continuous-Variable Fidelity Witness Toolkit - Demo")
    print("="*70)
    print()

    configure_logging(get_config())
    storage = ReportStore(Path(get_config().run.output_dir) / "demo")
    pipeline = BenchmarkPipeline(storage)

    for name in DEMO_CONFIGS:
        cfg = load_experiment(CONFIG_DIR / name)
        print("="*70)
        print(f"{name}: {cfg.scenario.value}")
        print("-"*70)

        oracle = pipeline.run_oracle(cfg)
        print(f"  exact W = {oracle.oracle['W']:.6f}, exact F = {oracle.oracle['F']:.6f}")

        report = pipeline.run(cfg)
        print(f"  sampled W = {report.witness:.6f} (epsilon {cfg.epsilon}, delta {cfg.delta})")
        print(f"  shots used: {report.shots}, {report.budget.label}: {report.budget.N_total}")
        print()

    print("="*70)
    print("Demo complete!")
    print("="*70)
    print()
    print("Try these commands:")
    print("  python cli.py oracle --config configs/cubic_mismatch.json")
    print("  python cli.py benchmark-gaussian --config configs/channel_squeezer.json --threads 4")
    print("  python cli.py plan --config configs/channel_two_mode.json")
    print()


if __name__ == "__main__":
    main()
