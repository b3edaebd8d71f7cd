#!/usr/bin/env python3
"""
Demo Script for the GREM Laboratory

Walks through every part of the laboratory on desk-scale examples without
writing any files: phase classification, exact moments, normalizers, a
small simulated ensemble, zeros of one realisation, the cascade zeta
function, the continuous hierarchy and a fluctuation test.
"""

import logging
import math

import numpy as np

from cascade import i_gamma, sample_cascade, stability_test, zeta_eval
from config import get_log_level
from model import build_model, normalizer
from moments import variance_exact, window_correlation
from phase import CremProfile, classify, crem_log_partition, laplacian_check, phase_census
from simulate import SimConfig, empirical_log_partition, sample_leaf_field, sample_partition
from stats import select_law, test_against_law
from zeros import find_zeros, zero_statistics

logging.basicConfig(
    level=get_log_level(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def run_demo():
    print("🌡️  GREM Complex-Temperature Laboratory Demo")
    print("=" * 50)

    rem = build_model(1, [2.0 * math.log(2.0)], [2.0])
    grem = build_model(2, [2.0, 2.0], [math.e, math.e ** 2])
    print(f"REM:  sigma = {rem.sigma}")
    print(f"GREM: sigma = {tuple(round(s, 4) for s in grem.sigma)}")

    print("\n📐 Phase diagram")
    print("-" * 40)
    for beta in (0.2 + 0.1j, 0.3 + 0.8j, 1.5 + 0.2j, 0.9 + 0.5j):
        print(f"  beta={beta}: {classify(grem, beta).word}")
    census = phase_census(build_model(4, [1.0] * 4, [math.exp(s * s / 2.0) for s in (0.6, 1.0, 1.5, 2.2)]),
                          nx=200, ny=200)
    print(f"  census of a 4-level model: {census.phase_count} open phases, ordered={census.ordered}")
    report = laplacian_check(grem, (0.05, 3.0, 0.05, 3.0), 1e-2, samples_per_curve=4)
    print(f"  Laplacian check: interior error {report.interior_max_error:.2e}, "
          f"jump error {report.max_jump_error:.2e}")

    print("\n📊 Exact moments (n = 20)")
    print("-" * 40)
    moments = variance_exact(grem, 20, 0.3 + 0.1j)
    print(f"  E Z = {moments.mean:.4g}, Var Z = {moments.var:.4g}, dominant overlap {moments.dominant}")
    corr = window_correlation(grem, 20, 0.3 + 0.5j, 0.1, 0.2j)
    print(f"  window correlation {corr.cov_conj:.4g} (limit {corr.limit_cov_conj:.4g})")
    print(f"  c_n(1.5+0.2i) = {normalizer(grem, 20, 'c_n', 1.5 + 0.2j):.4g}")

    print("\n🎲 Simulation (REM, n = 12, 200 replicates)")
    print("-" * 40)
    config = SimConfig(model=rem, n=12, seed=7, replicates=200, betas=[0.5, 0.5 + 1.0j, 2.0], threads=1)
    summary = empirical_log_partition(sample_partition(config))
    for beta, median in zip(summary.betas, summary.median):
        print(f"  beta={beta}: median F_n = {median:.4f}")

    print("\n🎯 Zeros of one realisation (REM, n = 10)")
    print("-" * 40)
    field_ = sample_leaf_field(rem, 10, seed=3, replicate=0)
    zero_set = find_zeros(field_, (0.05, 0.6, 0.5, 2.0), rem, 10)
    stats_ = zero_statistics([zero_set], rem, 10)
    print(f"  {zero_set.count} zeros, scaled density {stats_.pooled_density:.3f} "
          f"(predicted {stats_.cells[0].predicted:.3f})")

    print("\n🌀 Poisson cascade zeta function")
    print("-" * 40)
    sample = sample_cascade(2, 200.0, seed=11)
    value = zeta_eval(sample, (0.9, 0.7), mode="continued")
    print(f"  zeta_P(0.9, 0.7) ~ {value.value:.4g} (increments {[round(x, 4) for x in value.increments]})")
    print(f"  I_gamma((3, 2); 1) with gamma=(1.2, 1) = {i_gamma((3, 2), 1.0, (1.2, 1.0)).real:.6f}")
    stab = stability_test(1, 0.8, 3, 300, 50.0, seed=5, threads=1)
    print(f"  stability m=3: p_modulus={stab.p_modulus:.3f}, p_argument={stab.p_argument:.3f}")

    print("\n🧵 Continuous hierarchy")
    print("-" * 40)
    profile = CremProfile((0.0, 0.5, 1.0), (0.0, 0.7, 1.0), math.e)
    print(f"  {crem_log_partition(profile, 1.1 + 0.2j).to_dict()}")

    print("\n🧪 Fluctuation test (REM strip, n = 12)")
    print("-" * 40)
    beta = 0.3 + 0.8j
    law = select_law(rem, 12, beta)
    ens = sample_partition(SimConfig(model=rem, n=12, seed=1, replicates=1000, betas=[beta], threads=1))
    moments = variance_exact(rem, 12, beta)
    normalized = (ens.values[:, 0] - moments.mean) / math.sqrt(moments.var)
    result = test_against_law(normalized, law)
    print(f"  law {law.kind.value}: passed={result.passed}, p={result.p_value:.3f}, "
          f"E|W|^2={np.mean(np.abs(normalized) ** 2):.3f}")

    print("\n✅ Demo completed")


if __name__ == "__main__":
    run_demo()
