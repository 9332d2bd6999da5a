"""
Property suite run by `hypersketch selftest`.

Each check draws its own seeded instances and reports PASS/FAIL with a
one-line detail. Trial counts scale every randomized check.
"""

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.stats import chisquare

from hypersketch.core.config import SketchConfig
from hypersketch.core.prf import Prf
from hypersketch.services.hypergraph.generators import (
    dynamic_stream, random_hypergraph, random_shards,
)
from hypersketch.services.incidence.bundle import SketchBundle
from hypersketch.services.mpc.simulator import MpcSimulator, expected_rounds, mpc_simulate
from hypersketch.services.oracle.exact_oracle import (
    count_small_kcuts, min_normalized_kcut, strength_characterization, strength_recursive,
    verify_sparsifier,
)
from hypersketch.services.sketch.l0_sampler import L0Sampler, SamplerSeeds
from hypersketch.services.sketch.one_sparse import OneSparseTester, TesterSeeds, Verdict
from hypersketch.services.sparsify.pipeline import decode_bundle
from hypersketch.services.stream.encoder import stream_encode

logger = logging.getLogger("hypersketch.selftest")

PASS_RATE = Fraction(95, 100)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _small_instances(rng: np.random.Generator, trials: int):
    for _ in range(trials):
        n = int(rng.integers(3, 7))
        m = int(rng.integers(1, 13))
        yield random_hypergraph(rng, n, m, min(4, n))


def check_oracle_consistency(rng: np.random.Generator, trials: int) -> CheckResult:
    mismatches = 0
    for H in _small_instances(rng, trials):
        strengths = strength_recursive(H)
        for e in H:
            if strengths[e] != strength_characterization(H, e):
                mismatches += 1
    return CheckResult("oracle-consistency", mismatches == 0, f"{mismatches} mismatches over {trials} hypergraphs")


def check_strength_count(rng: np.random.Generator, trials: int) -> CheckResult:
    violations = 0
    for H in _small_instances(rng, trials):
        strengths = strength_recursive(H)
        for w in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)):
            light = sum(H.weight(e) for e in strengths.below(w))
            if light > (H.n - 1) * w:
                violations += 1
    return CheckResult("strength-count", violations == 0, f"{violations} violations")


def check_cut_count(rng: np.random.Generator, trials: int) -> CheckResult:
    violations = 0
    for H in _small_instances(rng, trials):
        # the bound is for connected hypergraphs; a zero cut makes every refinement small
        if not len(H) or min_normalized_kcut(H)[0] == 0:
            continue
        for t in (1, 2):
            if count_small_kcuts(H, Fraction(t)) > H.n ** (2 * t):
                violations += 1
    return CheckResult("cut-count", violations == 0, f"{violations} violations")


def check_one_sparse(rng: np.random.Generator, trials: int, universe_bits: int = 10) -> CheckResult:
    prf = Prf(rng.bytes(32), "selftest")
    seeds = TesterSeeds.from_prf(prf.child("ost"))
    wrong = 0
    for edge_id in range(1, 1 << universe_bits):
        weight = int(rng.integers(1, 5)) * (1 if edge_id % 2 else -1)
        t = OneSparseTester().add(edge_id, weight, seeds.power(edge_id))
        decoded = t.decode(seeds)
        if decoded.verdict is not Verdict.ONE_SPARSE or decoded.edge_id != edge_id or decoded.weight != weight:
            wrong += 1
    false_positive = 0
    states = 100 * trials
    for i in range(states):
        fresh = TesterSeeds.from_prf(prf.child("fresh", i))
        a, b = (int(x) for x in rng.choice(np.arange(1, 1 << universe_bits), size=2, replace=False))
        t = OneSparseTester()
        t.add(a, 1, fresh.power(a))
        t.add(b, 1, fresh.power(b))
        if t.decode(fresh).verdict is Verdict.ONE_SPARSE:
            false_positive += 1
    ok = wrong == 0 and false_positive <= max(1, states // 1000)
    return CheckResult("one-sparse", ok, f"{wrong} exact-decode errors, {false_positive}/{states} false one-sparse")


def check_l0_uniformity(rng: np.random.Generator, trials: int, support: int = 20) -> CheckResult:
    samples = max(200, 50 * trials)
    prf = Prf(rng.bytes(32), "selftest")
    ids = [int(x) for x in rng.choice(np.arange(1, 1 << 16), size=support, replace=False)]
    counts = {i: 0 for i in ids}
    misses = 0
    for s in range(samples):
        sampler = L0Sampler(SamplerSeeds(prf.child("l0", s), levels=8, repetitions=12))
        for i in ids:
            sampler.update(i, 1)
        got = sampler.sample()
        if got is None:
            misses += 1
        else:
            counts[got[0]] += 1
    observed = [counts[i] for i in ids]
    p_value = float(chisquare(observed).pvalue) if sum(observed) else 0.0
    ok = p_value > 1e-3 and misses <= max(2, samples // 50)
    return CheckResult("l0-uniformity", ok, f"chi-square p={p_value:.4f}, {misses}/{samples} empty samples")


def check_linearity(rng: np.random.Generator, trials: int, config: SketchConfig, prf: Prf) -> CheckResult:
    differing = 0
    for _ in range(trials):
        H = random_hypergraph(rng, config.n, int(rng.integers(1, config.m_max // 2 + 1)), config.r_max)
        updates = dynamic_stream(rng, H, 0.3, config.r_max)
        reference = stream_encode(updates, config, prf).to_bytes()
        order = [updates[int(i)] for i in rng.permutation(len(updates))]
        if stream_encode(order, config, prf, strict=False).to_bytes() != reference:
            differing += 1
        shards = random_shards(rng, updates, 3)
        merged = SketchBundle.empty(config, prf)
        for shard in shards:
            merged += stream_encode(shard, config, prf, strict=False)
        if merged.to_bytes() != reference:
            differing += 1
    e = random_hypergraph(rng, config.n, 1, config.r_max)
    cancel = SketchBundle.of_hypergraph(e, config, prf)
    for edge, w in e.items():
        cancel.encode_update(edge, -w)
    empty_ok = cancel.to_bytes() == SketchBundle.empty(config, prf).to_bytes()
    return CheckResult("linearity", differing == 0 and empty_ok,
                       f"{differing} byte mismatches; insert-then-delete empty={empty_ok}")


def check_end_to_end(rng: np.random.Generator, trials: int, config: SketchConfig, prf: Prf) -> CheckResult:
    passed = 0
    worst = Fraction(1)
    oversize = 0
    for t in range(trials):
        H = random_hypergraph(rng, config.n, int(rng.integers(1, config.m_max // 2 + 1)), config.r_max)
        trial_prf = prf.child("trial", t)
        bundle = stream_encode(dynamic_stream(rng, H, 0.3, config.r_max), config, trial_prf)
        output = decode_bundle(bundle)
        result = verify_sparsifier(H, output.as_hypergraph(), config.eps, kcuts=config.n <= config.oracle_vertex_cap)
        passed += result.ok
        if abs(result.worst_ratio - 1) > abs(worst - 1):
            worst = result.worst_ratio
        if not output.within_size_bound(slack=10)[0]:
            oversize += 1
    ok = passed >= PASS_RATE * trials and oversize == 0
    return CheckResult("end-to-end", ok, f"{passed}/{trials} verified, worst ratio {float(worst):.3f}, "
                                         f"{oversize} over 10x size bound")


def check_mpc(rng: np.random.Generator, trials: int, config: SketchConfig, prf: Prf) -> CheckResult:
    differing = 0
    off_schedule = 0
    for _ in range(trials):
        H = random_hypergraph(rng, config.n, int(rng.integers(1, config.m_max // 2 + 1)), config.r_max)
        edges = [e for e, w in H.items() for _ in range(w)]
        k = int(rng.integers(1, 2 * config.n + 1))
        report = mpc_simulate(random_shards(rng, edges, k), config, prf, memory_budget=1 << 40, decode=False)
        if report.coordinator_bank != SketchBundle.of_hypergraph(H, config, prf).to_bytes():
            differing += 1
        off_schedule += not report.rounds_match
    # The schedule depends only on (n, k); k = m / n machines holding n edges each.
    wrong_rounds = []
    for k in (1, config.n, config.n ** 2):
        simulator = MpcSimulator(config, prf, k, memory_budget=1 << 40)
        simulator.run([[] for _ in range(k)])
        if simulator.rounds != expected_rounds(config.n, k * config.n):
            wrong_rounds.append(k)
    return CheckResult("mpc", differing == 0 and off_schedule == 0 and not wrong_rounds,
                       f"{differing} coordinator mismatches, {off_schedule} runs off the round formula, "
                       f"round-count mismatches at k={wrong_rounds}")


CHECKS = ("oracle-consistency", "strength-count", "cut-count", "one-sparse", "l0-uniformity",
          "linearity", "end-to-end", "mpc")


def run_selftest(config: SketchConfig, prf: Prf, trials: int = 10, seed: int = 0,
                 only: Optional[List[str]] = None) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    checks: Dict[str, Callable[[], CheckResult]] = {
        "oracle-consistency": lambda: check_oracle_consistency(rng, trials),
        "strength-count": lambda: check_strength_count(rng, trials),
        "cut-count": lambda: check_cut_count(rng, trials),
        "one-sparse": lambda: check_one_sparse(rng, trials),
        "l0-uniformity": lambda: check_l0_uniformity(rng, trials),
        "linearity": lambda: check_linearity(rng, trials, config, prf),
        "end-to-end": lambda: check_end_to_end(rng, trials, config, prf),
        "mpc": lambda: check_mpc(rng, trials, config, prf),
    }
    results = []
    for name, check in checks.items():
        if only and name not in only:
            continue
        start = time.monotonic()
        result = check()
        result.seconds = time.monotonic() - start
        logger.info(result.line())
        results.append(result)
    return results
