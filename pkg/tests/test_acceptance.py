"""Acceptance suite: seven end-to-end criteria with pinned tolerances.

Each criterion prints one PASS/FAIL line (run ``pytest -s`` or rely on the
configured ``-rP`` summary to see them). Tolerances are frozen here and
must not be loosened to make a failing criterion pass.
"""

import json
import time

import numpy as np
import pytest

from actrate.binary import (
    binary_structured_aux,
    bstar,
    make_binary_example,
    parametric_min_causal,
    parametric_min_noncausal,
    rate_causal_binary,
    rate_erased_causal,
    rate_erased_noncausal,
    rate_noncausal_binary,
)
from actrate.cli import main
from actrate.errors import SearchSpaceError
from actrate.kernel import binary_entropy, conditional_mutual_information, entropy_bits
from actrate.model import (
    ActionPolicy,
    AuxiliaryChoice,
    ProblemSpec,
    assemble_joint,
    expected_cost,
    lossy_bound_si_both,
    lossy_bound_si_decoder,
    noncausal_rate,
    reduced_cost,
)
from actrate.sim import SimConfig, run_campaign
from actrate.solver import (
    SolveConfig,
    brute_force_oracle,
    solve_causal,
    solve_lossy_causal,
    solve_noncausal,
    trace_curve,
)

H2 = binary_entropy


def report(number: int, name: str, ok: bool, detail: str) -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"acceptance criterion {number} [{name}]: {verdict} ({detail})")
    assert ok, f"criterion {number} [{name}] failed: {detail}"


def qrand_spec(rng):
    """One random instance within the property-suite size box."""
    s = int(rng.integers(2, 4))
    z = int(rng.integers(1, 3))
    a = int(rng.integers(2, 4))
    y = int(rng.integers(2, 4))
    sj = rng.random((s, z)) + 0.05
    sj /= sj.sum()
    ch = rng.random((a, s, y)) + 0.05
    ch /= ch.sum(axis=-1, keepdims=True)
    return ProblemSpec(state_joint=sj, channel=ch, cost=rng.random((a, s, y)))


def test_criterion_1_closed_form_curve(tmp_path):
    """Closed-form CSV emission: endpoints, linearity below the kink,
    branch continuity, causal line; all to 1e-9 and under a second."""
    t0 = time.perf_counter()
    budgets = "0:0.5:0.05"
    rows = {}
    for variant in ("noncausal", "causal"):
        out = tmp_path / f"{variant}.csv"
        assert main(["closed-form", "--p", "0.1", "--variant", variant,
                     "--budgets", budgets, "--out", str(out)]) == 0
        data = [line for line in out.read_text().splitlines()
                if line and not line.startswith("#") and not line.startswith("B,")]
        rows[variant] = [(float(r.split(",")[0]), float(r.split(",")[2]))
                        for r in data]
    elapsed = time.perf_counter() - t0

    worst = 0.0
    nc = dict(rows["noncausal"])
    ca = dict(rows["causal"])
    worst = max(worst, abs(nc[0.0] - 1.0), abs(nc[0.5] - H2(0.1)))
    worst = max(worst, abs(ca[0.0] - 1.0), abs(ca[0.5] - H2(0.1)))
    for b, r in rows["causal"]:
        worst = max(worst, abs(r - (2 * b * H2(0.1) + 1 - 2 * b)))
    kink = bstar(0.1)
    below = [(b, r) for b, r in rows["noncausal"] if b < kink]
    vals = [r for _, r in below]
    second_diffs = np.abs(np.diff(vals, 2)) if len(vals) >= 3 else [0.0]
    worst = max(worst, float(np.max(second_diffs)))
    jump = abs(rate_noncausal_binary(kink - 1e-12, 0.1)
               - rate_noncausal_binary(kink + 1e-12, 0.1))
    worst = max(worst, jump)
    ok = worst <= 1e-9 and elapsed < 1.0
    report(1, "closed-form curve", ok,
           f"worst dev {worst:.3g} <= 1e-9, {elapsed:.2f}s < 1s")


def test_criterion_2_solver_vs_closed_form():
    """Default-configuration solves match the closed forms within 5e-3 on
    the canonical budget grid."""
    t0 = time.perf_counter()
    spec = make_binary_example(0.1)
    cfg = SolveConfig()
    worst = 0.0
    for b in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5):
        worst = max(
            worst,
            abs(solve_noncausal(spec, b, cfg).rate - rate_noncausal_binary(b, 0.1)),
            abs(solve_causal(spec, b, cfg).rate - rate_causal_binary(b, 0.1)),
        )
    elapsed = time.perf_counter() - t0
    ok = worst <= 5e-3 and elapsed < 600.0
    report(2, "solver vs closed form", ok,
           f"worst gap {worst:.3g} <= 5e-3, {elapsed:.0f}s < 600s")


def test_criterion_3_erased_side_information():
    """Half-erased curves equal the mixture of independently computed
    components; the degenerate erasure rates reduce exactly."""
    p, pe = 0.1, 0.5
    h_floor = entropy_bits(np.array([p, 1 - p]))
    worst = 0.0
    for b in np.arange(0.0, 0.5001, 0.05):
        b = float(b)
        # plain-curve component from the parametric family, floor from the
        # raw entropy sum: neither route shares code with rate_erased_*
        expect_nc = pe * parametric_min_noncausal(b, p)[0] + (1 - pe) * h_floor
        expect_ca = pe * parametric_min_causal(b, p)[0] + (1 - pe) * h_floor
        worst = max(
            worst,
            abs(rate_erased_noncausal(b, p, pe) - expect_nc),
            abs(rate_erased_causal(b, p, pe) - expect_ca),
        )
    exact = True
    for b in (0.0, 0.15, 0.3, 0.45):
        exact &= rate_erased_noncausal(b, p, 1.0) == rate_noncausal_binary(b, p)
        exact &= rate_erased_causal(b, p, 1.0) == rate_causal_binary(b, p)
        exact &= rate_erased_noncausal(b, p, 0.0) == H2(p)
        exact &= rate_erased_causal(b, p, 0.0) == H2(p)
    ok = worst <= 1e-6 and exact
    report(3, "erased side information", ok,
           f"mixture worst {worst:.3g} <= 1e-6, degenerate reductions exact={exact}")


def test_criterion_4_oracle_equivalence():
    """Dense-grid oracle vs the parametric strategy family, and the family
    vs the closed forms.

    The causal oracle runs at the full |V| = 4; the non-causal dense-64
    enumeration at |V| = 4 needs ~1.6e11 evaluations and the guard must
    refuse it, so its agreement check runs at |V| = 3 (enough symbols for
    every optimal binary strategy: two informative plus one idle)."""
    spec = make_binary_example(0.1)
    budgets = (0.1, 0.25, 0.4)

    worst_param = 0.0
    for b in budgets:
        worst_param = max(
            worst_param,
            abs(parametric_min_noncausal(b, 0.1)[0] - rate_noncausal_binary(b, 0.1)),
            abs(parametric_min_causal(b, 0.1)[0] - rate_causal_binary(b, 0.1)),
        )

    worst_oracle = 0.0
    for b in budgets:
        pt_c = brute_force_oracle(spec, b, "causal", dense_steps=64, v_size=4)
        worst_oracle = max(
            worst_oracle, abs(pt_c.rate - parametric_min_causal(b, 0.1)[0])
        )
        pt_n = brute_force_oracle(spec, b, "noncausal", dense_steps=64, v_size=3)
        worst_oracle = max(
            worst_oracle, abs(pt_n.rate - parametric_min_noncausal(b, 0.1)[0])
        )
    refused = False
    try:
        brute_force_oracle(spec, 0.25, "noncausal", dense_steps=64, v_size=4)
    except SearchSpaceError:
        refused = True

    ok = worst_param <= 1e-6 and worst_oracle <= 1e-2 and refused
    report(4, "oracle equivalence", ok,
           f"parametric vs closed {worst_param:.3g} <= 1e-6, "
           f"oracle vs parametric {worst_oracle:.3g} <= 1e-2, "
           f"oversized non-causal enumeration refused={refused}")


def test_criterion_5_property_suite():
    """Structural properties on 50 randomized small instances."""
    rng = np.random.default_rng(2024)
    cfg = SolveConfig(grid_steps=6, v_size_max=2, refine_rounds=0)
    budgets = [0.2, 0.45, 0.7, 0.95]
    worst = {"monotone": 0.0, "convex": 0.0, "order": 0.0, "markov": 0.0,
             "cost": 0.0, "identity_u": 0.0}
    for _ in range(50):
        spec = qrand_spec(rng)
        curve = trace_curve(spec, budgets, "noncausal", cfg)
        feas = [pt for pt in curve.points if pt.feasible]
        rates = [pt.rate for pt in feas]
        for r1, r2 in zip(rates, rates[1:]):
            worst["monotone"] = max(worst["monotone"], r2 - r1)
        if len(feas) >= 3:
            bs = [pt.budget for pt in feas]
            for i in range(1, len(feas) - 1):
                lhs = (rates[i] - rates[i - 1]) / (bs[i] - bs[i - 1])
                rhs = (rates[i + 1] - rates[i]) / (bs[i + 1] - bs[i])
                worst["convex"] = max(worst["convex"], lhs - rhs)
        for pt in feas:
            if pt.argmin is None:
                continue
            j = assemble_joint(spec, pt.argmin, causal=False)
            worst["markov"] = max(
                worst["markov"],
                conditional_mutual_information(
                    j, (j.axis("v"),), (j.axis("z"),), (j.axis("s"),)
                ),
            )
            p_sa = j.marginal([j.axis("s"), j.axis("a")])
            worst["cost"] = max(
                worst["cost"],
                abs(expected_cost(j, spec) - float((p_sa * reduced_cost(spec)).sum())),
            )
        # committing V before S can never help: same grid, no refinement,
        # so the causal candidates embed exactly into the non-causal sweep
        for b in (0.3, 0.8):
            nc = solve_noncausal(spec, b, cfg)
            ca = solve_causal(spec, b, cfg)
            if nc.feasible and ca.feasible:
                worst["order"] = max(worst["order"], nc.rate - ca.rate)
        # a description that copies Y reduces the decoder-side lossy bound
        # to the lossless objective
        aux = feas[-1].argmin if feas else None
        if aux is not None:
            with_u = AuxiliaryChoice(
                policy=aux.policy, v_given_s=aux.v_given_s,
                u_given_y=np.eye(spec.y_size),
            )
            ju = assemble_joint(spec, with_u, causal=False)
            val, markov_ok = lossy_bound_si_decoder(ju)
            worst["identity_u"] = max(
                worst["identity_u"], abs(val - noncausal_rate(ju))
            )
            assert markov_ok

    ok = (worst["monotone"] <= 1e-12 and worst["convex"] <= 1e-9
          and worst["order"] <= 1e-10 and worst["markov"] <= 1e-10
          and worst["cost"] <= 1e-12 and worst["identity_u"] <= 1e-12)
    report(5, "property suite", ok,
           ", ".join(f"{k} {v:.3g}" for k, v in worst.items()))


def test_criterion_6_lossy_reductions():
    spec = make_binary_example(0.1, with_distortion=True)
    cfg = SolveConfig(grid_steps=8, v_size_max=2, refine_rounds=1)
    worst_zero = 0.0
    for b in (0.2, 0.25):
        worst_zero = max(
            worst_zero,
            abs(solve_lossy_causal(spec, b, 0.0, cfg).rate
                - solve_causal(spec, b, cfg).rate),
        )
    slack_pt = solve_lossy_causal(spec, 0.2, 1.0, cfg)
    zero_at_max = slack_pt.rate == 0.0 and slack_pt.feasible

    # identity reconstruction turns the encoder-side lossy bound into the
    # lossless non-causal objective
    worst_identity = 0.0
    rng = np.random.default_rng(77)
    for _ in range(20):
        theta = float(rng.uniform(0.1, 1.0))
        delta = float(rng.uniform(0.0, 0.5))
        base = binary_structured_aux(theta, delta)
        recon = np.zeros((2, 3, 1, 2))
        recon[0, :, :, 0] = 1.0
        recon[1, :, :, 1] = 1.0
        aux = AuxiliaryChoice(policy=base.policy, v_given_s=base.v_given_s,
                              recon=recon)
        j = assemble_joint(spec, aux, causal=False)
        worst_identity = max(
            worst_identity, abs(lossy_bound_si_both(j) - noncausal_rate(j))
        )
    ok = worst_zero <= 1e-3 and zero_at_max and worst_identity <= 1e-9
    report(6, "lossy reductions", ok,
           f"D=0 gap {worst_zero:.3g} <= 1e-3, zero rate at max distortion="
           f"{zero_at_max}, identity-reconstruction gap {worst_identity:.3g}"
           " <= 1e-9")


def test_criterion_7_simulation():
    t0 = time.perf_counter()
    spec = make_binary_example(0.1)
    aux = AuxiliaryChoice(
        policy=ActionPolicy(np.array([[0, 1], [1, 0]])),
        v_given_s=np.full((2, 2), 0.5),
    )

    def binning(rate):
        return run_campaign(spec, aux, SimConfig(
            n=14, trials=500, seed=11, mode="binning", rate=rate,
            codebook_rate_v=0.25, epsilon=0.5))

    hi = binning(H2(0.1) + 0.15)
    lo = binning(H2(0.1) - 0.10)
    threshold_ok = hi.error_rate < lo.error_rate
    deterministic = hi.to_json() == binning(H2(0.1) + 0.15).to_json()
    cost_ok = abs(hi.empirical_cost - 0.5) <= 3 * hi.empirical_cost_se

    cover = run_campaign(spec, aux, SimConfig(
        n=14, trials=500, seed=11, mode="covering", codebook_rate_v=0.6,
        epsilon=0.5))
    mismatch_ok = (cover.vhat_mismatch_count > 0
                   and cover.vhat_mismatch_decoded_ok == cover.vhat_mismatch_count)
    elapsed = time.perf_counter() - t0

    ok = threshold_ok and deterministic and cost_ok and mismatch_ok and elapsed < 300
    report(7, "simulation properties", ok,
           f"err {hi.error_rate:.3f} @ R=H2+0.15 < {lo.error_rate:.3f} @ "
           f"R=H2-0.1, deterministic={deterministic}, cost {hi.empirical_cost:.4f}"
           f" within 3 SE of 0.5, mismatches {cover.vhat_mismatch_count} all "
           f"decoded ok={mismatch_ok}, {elapsed:.0f}s < 300s")
