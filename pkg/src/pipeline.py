"""
Main pipeline orchestrator: builds the target, device and probe ensemble of
an experiment, runs the sampling protocol, aggregates each estimator by
median of means, assembles the witness and attaches exact oracle values.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .channels import probe_gaussian, target_output
from .config import get_config
from .errors import ConfigError, NumericError
from .estimators import aggregate_batches, batch_count, batch_size, lower_median
from .experiment import ExperimentConfig
from .models import ComplexityBudget, Kernel, MoMResult, RunReport, Scenario, VarianceMode
from .planner import (
    amplifier_bound_inputs, channel_bound_inputs, cubic_bound_inputs, plan_amplifier, plan_channel,
    plan_cubic, plan_state, state_bound_inputs,
)
from .protocols import (
    AmplifierShotSampler, ChannelShotSampler, CubicShotSampler, ShotSampler, StateShotSampler,
)
from .rng import batch_stream, pilot_stream
from .storage import ReportStore
from .witnesses import (
    amplifier_fidelity, average_channel_fidelity, channel_known_term, cubic_fidelity,
    exact_amplifier_witness, exact_channel_witness, exact_cubic_witness, exact_state_witness,
    state_fidelity, witness_amplifier, witness_cubic, witness_gaussian_channel,
    witness_gaussian_state,
)

logger = logging.getLogger(__name__)

# Variance-bound key in ComplexityBudget.variance_bounds for each kernel
_BOUND_KEYS = {
    Kernel.CHI: 'chi', Kernel.X: 'X',
    Kernel.CHI_C: 'chi', Kernel.X_C: 'X',
    Kernel.ZETA: 'zeta', Kernel.Z: 'Z',
}


def kernel_accuracy(kernel: Kernel, epsilon: float, delta: float) -> Tuple[float, float]:
    """
    Per-estimator (epsilon, delta).

    Two-estimator witnesses give chi the full epsilon and X twice that, each
    with delta/2; the witness error 1/4 (err_X + 2 err_chi) then stays within
    epsilon with probability 1 - delta.
    """
    if kernel in (Kernel.CHI, Kernel.CHI_C):
        return epsilon, delta / 2
    if kernel in (Kernel.X, Kernel.X_C):
        return 2 * epsilon, delta / 2
    return epsilon, delta


def assemble_witness(scenario: Scenario, estimates: Dict[str, float], known: Dict[str, float]) -> float:
    """Witness value from estimator outputs and the exactly known terms"""
    scenario = Scenario(scenario)
    if scenario is Scenario.GAUSSIAN_STATE:
        return 1.0 + known['modes'] / 2 - 0.25 * (estimates['X'] - 2 * estimates['chi'] + known['t3'])
    if scenario is Scenario.GAUSSIAN_CHANNEL:
        return (1.0 + known['modes'] / 2 - 0.25 * estimates['X_c']
                - 0.25 * known['target_first_moments'] + 0.5 * estimates['chi_c'])
    if scenario is Scenario.AMPLIFIER:
        return 1.5 - known['gain_photon_term'] - estimates['zeta']
    return 1.5 - known['mean_photon_number'] - estimates['Z']


def recompute_witness(report: Dict[str, Any]) -> float:
    """Re-derive the witness from the per-batch means stored in a report"""
    estimates = {
        name: lower_median(result['batch_means'])
        for name, result in report['estimators'].items()
    }
    return assemble_witness(Scenario(report['scenario']), estimates, report['known_terms'])


class BenchmarkPipeline:
    """Main benchmarking orchestrator"""

    def __init__(self, storage: Optional[ReportStore] = None, verbose: bool = True):
        self.config = get_config()
        self.storage = storage
        self.verbose = verbose

    def _step(self, message: str):
        if self.verbose:
            print(message)

    # Entry points

    def run(self, cfg: ExperimentConfig) -> RunReport:
        """Dispatch on the experiment scenario"""
        runners = {
            Scenario.GAUSSIAN_STATE: self.run_certify_state,
            Scenario.GAUSSIAN_CHANNEL: self.run_benchmark_gaussian,
            Scenario.AMPLIFIER: self.run_benchmark_amplifier,
            Scenario.CUBIC: self.run_benchmark_cubic,
        }
        return runners[cfg.scenario](cfg)

    def run_certify_state(self, cfg: ExperimentConfig) -> RunReport:
        """Fidelity witness between U|alpha> and the device output"""
        self._require(cfg, Scenario.GAUSSIAN_STATE)
        start = time.perf_counter()
        self._step("Step 1: Building target and prepared state...")
        alpha = cfg.ensemble.amplitudes[0]
        target, prep = target_output(cfg.target, alpha), probe_gaussian(cfg.device, alpha)
        sampler = StateShotSampler(target, prep)
        budget = self._plan(cfg)
        known = {'modes': target.modes, 't3': float(target.x @ np.linalg.solve(target.V, target.x))}

        results, pilot_shots = self._estimate_all(cfg, sampler, budget)
        self._step("Step 4: Assembling witness...")
        witness = witness_gaussian_state(target, results['X'].estimate, results['chi'].estimate, known['t3'])
        oracle = self._oracle(cfg)
        return self._finish(cfg, witness.value, results, known, oracle, budget, pilot_shots, start)

    def run_benchmark_gaussian(self, cfg: ExperimentConfig) -> RunReport:
        """Average channel-fidelity witness for a Gaussian unitary target"""
        self._require(cfg, Scenario.GAUSSIAN_CHANNEL)
        start = time.perf_counter()
        self._step("Step 1: Building target outputs and device channel...")
        sampler = ChannelShotSampler(cfg.target, cfg.device, cfg.ensemble)
        budget = self._plan(cfg)
        known = {'modes': cfg.target.modes,
                 'target_first_moments': channel_known_term(cfg.target, cfg.ensemble)}

        results, pilot_shots = self._estimate_all(cfg, sampler, budget)
        self._step("Step 4: Assembling witness...")
        witness = witness_gaussian_channel(cfg.target, cfg.ensemble,
                                           results['X_c'].estimate, results['chi_c'].estimate)
        oracle = self._oracle(cfg)
        return self._finish(cfg, witness.value, results, known, oracle, budget, pilot_shots, start)

    def run_benchmark_amplifier(self, cfg: ExperimentConfig) -> RunReport:
        """Witness for the coherent-state amplifier |alpha> -> |g alpha>"""
        self._require(cfg, Scenario.AMPLIFIER)
        start = time.perf_counter()
        self._step("Step 1: Building amplifier outputs and observable dictionaries...")
        sampler = AmplifierShotSampler(cfg.gain, cfg.device, cfg.ensemble)
        budget = self._plan(cfg)
        known = {'gain_photon_term': cfg.gain ** 2 * cfg.ensemble.mean_photon_number()}

        results, pilot_shots = self._estimate_all(cfg, sampler, budget)
        self._step("Step 4: Assembling witness...")
        witness = witness_amplifier(cfg.gain, cfg.ensemble, results['zeta'].estimate)
        oracle = self._oracle(cfg)
        return self._finish(cfg, witness.value, results, known, oracle, budget, pilot_shots, start)

    def run_benchmark_cubic(self, cfg: ExperimentConfig) -> RunReport:
        """Witness for the cubic-phase gate exp(i gamma q^3)"""
        self._require(cfg, Scenario.CUBIC)
        start = time.perf_counter()
        self._step("Step 1: Building grid wavefunctions of the device outputs...")
        sampler = CubicShotSampler(cfg.gamma, cfg.device, cfg.ensemble, cfg.grid).prepare()
        budget = self._plan(cfg)
        known = {'mean_photon_number': cfg.ensemble.mean_photon_number()}

        results, pilot_shots = self._estimate_all(cfg, sampler, budget)
        self._step("Step 4: Assembling witness...")
        witness = witness_cubic(cfg.gamma, cfg.ensemble, results['Z'].estimate)
        oracle = self._oracle(cfg)
        return self._finish(cfg, witness.value, results, known, oracle, budget, pilot_shots, start)

    def run_plan(self, cfg: ExperimentConfig) -> ComplexityBudget:
        """Upper-bound shot budget from the simulated device's bound inputs"""
        self._step(f"Planning {cfg.scenario.value} (epsilon={cfg.epsilon}, delta={cfg.delta})...")
        budget = self._plan(cfg)
        if self.storage:
            self.storage.save_budget(budget, cfg.seed)
        return budget

    def run_oracle(self, cfg: ExperimentConfig) -> RunReport:
        """Exact witness and fidelity, no sampling"""
        start = time.perf_counter()
        self._step(f"Computing exact oracle for {cfg.scenario.value}...")
        W, F = self._exact(cfg)
        report = RunReport(
            scenario=cfg.scenario, seed=cfg.seed, config=cfg.to_dict(), witness=W,
            oracle={'W': W, 'F': F, 'gap': F - W},
            timing={'wall_seconds': time.perf_counter() - start},
        )
        if self.storage:
            self.storage.save_report(report, kind="oracle")
        return report

    # Internals

    @staticmethod
    def _require(cfg: ExperimentConfig, scenario: Scenario):
        if cfg.scenario is not scenario:
            raise ConfigError(f"expected a {scenario.value} experiment, got {cfg.scenario.value}")

    def _plan(self, cfg: ExperimentConfig) -> ComplexityBudget:
        if cfg.scenario is Scenario.GAUSSIAN_STATE:
            alpha = cfg.ensemble.amplitudes[0]
            inputs = state_bound_inputs(target_output(cfg.target, alpha), probe_gaussian(cfg.device, alpha))
            return plan_state(cfg.epsilon, cfg.delta, **inputs)
        if cfg.scenario is Scenario.GAUSSIAN_CHANNEL:
            return plan_channel(cfg.epsilon, cfg.delta,
                                **channel_bound_inputs(cfg.target, cfg.device, cfg.ensemble))
        if cfg.scenario is Scenario.AMPLIFIER:
            return plan_amplifier(cfg.epsilon, cfg.delta,
                                  **amplifier_bound_inputs(cfg.gain, cfg.device, cfg.ensemble))
        inputs = cubic_bound_inputs(cfg.gamma, cfg.device, cfg.ensemble, cfg.grid)
        return plan_cubic(cfg.epsilon, cfg.delta, cfg.gamma, cfg.ensemble, inputs['q_max'])

    def _exact(self, cfg: ExperimentConfig) -> Tuple[float, float]:
        if cfg.scenario is Scenario.GAUSSIAN_STATE:
            alpha = cfg.ensemble.amplitudes[0]
            target, prep = target_output(cfg.target, alpha), probe_gaussian(cfg.device, alpha)
            return exact_state_witness(target, prep).value, state_fidelity(target, prep)
        if cfg.scenario is Scenario.GAUSSIAN_CHANNEL:
            return (exact_channel_witness(cfg.target, cfg.device, cfg.ensemble).value,
                    average_channel_fidelity(cfg.target, cfg.device, cfg.ensemble))
        if cfg.scenario is Scenario.AMPLIFIER:
            return (exact_amplifier_witness(cfg.gain, cfg.device, cfg.ensemble).value,
                    amplifier_fidelity(cfg.gain, cfg.device, cfg.ensemble))
        return self._cubic_oracle(cfg)

    @staticmethod
    def _cubic_oracle(cfg: ExperimentConfig) -> Tuple[float, float]:
        cutoff = cfg.fock.cutoff
        return (exact_cubic_witness(cfg.gamma, cfg.device, cfg.ensemble, cutoff).value,
                cubic_fidelity(cfg.gamma, cfg.device, cfg.ensemble, cutoff))

    def _oracle(self, cfg: ExperimentConfig) -> Dict[str, float]:
        """Exact (W, F) when the device can be simulated exactly, else empty"""
        try:
            W, F = self._exact(cfg)
        except NumericError as exc:
            logger.warning("No exact oracle for %s: %s", cfg.scenario.value, exc)
            return {}
        return {'W': W, 'F': F, 'gap': F - W}

    def _variance_proxy(self, cfg: ExperimentConfig, sampler: ShotSampler, kernel: Kernel,
                        budget: ComplexityBudget) -> Tuple[float, int]:
        """(sigma^2 proxy, pilot shots spent)"""
        if cfg.variance_mode is VarianceMode.THEOREM:
            return budget.variance_bounds[_BOUND_KEYS[kernel]], 0
        values = sampler.draw(kernel, cfg.pilot_size, pilot_stream(cfg.seed, kernel.value)).values
        proxy = self.config.estimation.pilot_safety_factor * float(np.mean(values ** 2))
        logger.debug("pilot %s: E(Y^2) ~ %.6g from %d shots", kernel.value, proxy, cfg.pilot_size)
        return proxy, cfg.pilot_size

    def _batch_mean(self, sampler: ShotSampler, kernel: Kernel, seed: int, batch: int, size: int) -> float:
        """Mean of one batch, drawn in chunks from the batch's own stream"""
        rng = batch_stream(seed, kernel.value, batch)
        chunk = self.config.estimation.chunk_size
        total, remaining = 0.0, size
        while remaining:
            count = min(chunk, remaining)
            total += float(np.sum(sampler.draw(kernel, count, rng).values))
            remaining -= count
        return total / size

    def _estimate(self, cfg: ExperimentConfig, sampler: ShotSampler, kernel: Kernel,
                  proxy: float) -> MoMResult:
        epsilon, delta = kernel_accuracy(kernel, cfg.epsilon, cfg.delta)
        B = batch_count(delta)
        n = batch_size(epsilon, proxy)
        logger.debug("%s: %d batches of %d shots", kernel.value, B, n)
        with ThreadPoolExecutor(max_workers=cfg.threads) as executor:
            means = list(executor.map(lambda b: self._batch_mean(sampler, kernel, cfg.seed, b, n), range(B)))
        return aggregate_batches(means, n, epsilon, delta, proxy)

    def _estimate_all(self, cfg: ExperimentConfig, sampler: ShotSampler,
                      budget: ComplexityBudget) -> Tuple[Dict[str, MoMResult], int]:
        self._step(f"Step 2: Sizing batches ({cfg.variance_mode.value} variance)...")
        proxies, pilot_shots = {}, 0
        for kernel in sampler.kernels:
            proxies[kernel], spent = self._variance_proxy(cfg, sampler, kernel, budget)
            pilot_shots += spent

        self._step("Step 3: Sampling shots...")
        results = {}
        for kernel in sampler.kernels:
            results[kernel.value] = self._estimate(cfg, sampler, kernel, proxies[kernel])
            if self.verbose:
                r = results[kernel.value]
                print(f"  {kernel.value}: {r.estimate:.6f} ({r.B} x {r.per_batch_size} shots)")
        return results, pilot_shots

    def _finish(self, cfg: ExperimentConfig, witness: float, results: Dict[str, MoMResult],
                known: Dict[str, float], oracle: Dict[str, float], budget: ComplexityBudget,
                pilot_shots: int, start: float) -> RunReport:
        report = RunReport(
            scenario=cfg.scenario,
            seed=cfg.seed,
            config=cfg.to_dict(),
            witness=witness,
            epsilon=cfg.epsilon,
            delta=cfg.delta,
            variance_mode=cfg.variance_mode.value,
            estimators=results,
            known_terms=known,
            oracle=oracle,
            shots=sum(r.total_N for r in results.values()),
            pilot_shots=pilot_shots,
            budget=budget,
            timing={'wall_seconds': time.perf_counter() - start},
        )
        self._step(f"Witness estimate: {witness:.6f} +/- {cfg.epsilon} (delta={cfg.delta})")
        if self.storage:
            self.storage.save_report(report)
        return report
