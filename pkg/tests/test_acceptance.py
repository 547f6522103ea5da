"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  All tolerances are pinned here.
"""

import math

import numpy as np

from advchan import adversary as adv
from advchan import capacity as cap
from advchan import codes, sim
from advchan.channel import (ERASURE, ChannelParams, make_streams,
                             run_transmission)


def report(n, text):
    print(f"PASS criterion {n}: {text}")


def test_criterion_1_closed_form_exactness():
    assert cap.capacity_erasure(0.1, 0.3) == (1 - 2 * 0.1) * (1 - 0.3)
    assert abs(cap.capacity_erasure(0.1, 0.3) - 0.56) < 1e-15
    for p in np.linspace(0.5, 1.0, 51):
        for q in np.linspace(0.0, 1.0, 21):
            assert cap.capacity_erasure(float(p), float(q)) == 0.0
    assert cap.capacity_erasure_feedback(0.5, 0.5) == 0.25
    report(1, "erasure capacities match closed forms to machine epsilon")


def test_criterion_2_bound_equivalence():
    worst = 0.0
    for p in np.linspace(0.0, 0.249, 250):
        for q in np.linspace(0.0, 0.49, 50):
            num = cap.upper_bound_flip_numeric(float(p), float(q), 1e-9).value
            closed = cap.upper_bound_flip_closed(float(p), float(q))
            worst = max(worst, abs(num - closed))
    assert worst < 1e-6
    report(2, f"numeric vs closed flip bound, 250x50 grid, worst diff {worst:.2e} < 1e-6")


def test_criterion_3_p0_contract_and_tangency():
    for q in (0.0, 0.1, 0.2, 0.3, 0.4):
        p0 = cap.p0_solve(q, tol=1e-12)
        assert abs(cap.p0_residual(p0, q)) < 1e-10
    p0q0 = cap.p0_solve(0.0, tol=1e-12)
    assert abs(p0q0 * (1 - p0q0) ** 3 - 1.0 / 16.0) < 1e-10
    for q in (0.0, 0.1, 0.2, 0.3, 0.4):
        p0 = cap.p0_solve(q, tol=1e-13)
        curve = 1 - cap.h2(cap.star(p0, q))
        linear = (1 - 4 * p0) / (1 - 4 * p0) * curve
        assert abs(linear - curve) < 1e-9
        slope_line = -4 * curve / (1 - 4 * p0)
        h = 1e-6
        slope_fd = (cap.h2(cap.star(p0 - h, q)) - cap.h2(cap.star(p0 + h, q))) / (2 * h)
        assert abs(slope_line - slope_fd) < 1e-5
    report(3, "p0 residuals < 1e-10, q=0 identity < 1e-10, tangency 1e-9 / 1e-5")


def test_criterion_4_figure_curves():
    erasure_ps = [round(0.002 * i, 6) for i in range(301)]  # 0..0.6
    for q in (0.0, 0.3, 0.6):
        for fn in (cap.capacity_erasure, cap.capacity_erasure_feedback):
            vals = [fn(p, q) for p in erasure_ps]
            assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert cap.capacity_erasure(0.5, q) == 0.0
        assert cap.capacity_erasure(0.498, q) > 0.0
    flip_ps = [round(0.001 * i, 6) for i in range(301)]  # 0..0.3
    for q in (0.0, 0.1, 0.2):
        upper = [cap.upper_bound_flip_closed(p, q) for p in flip_ps]
        lower = [cap.achievable_flip(p, q) for p in flip_ps]
        assert all(a >= b - 1e-12 for a, b in zip(upper, upper[1:]))
        assert all(a >= b - 1e-12 for a, b in zip(lower, lower[1:]))
        assert cap.upper_bound_flip_closed(0.25, q) == 0.0
        assert cap.upper_bound_flip_closed(0.249, q) > 0.0
        for u, l in zip(upper, lower):
            assert l <= u + 1e-12
    at_q0 = [(cap.upper_bound_flip_closed(p, 0.0), cap.achievable_flip(p, 0.0))
             for p in flip_ps]
    assert all(u == l for u, l in at_q0)
    report(4, "curve monotonicity, cutoffs at 1/2 and 1/4, lower <= upper, equality at q=0")


def test_criterion_5_arq_rate():
    p, q, k = 0.2, 0.1, 1000
    scenario = sim.Scenario(
        channel=ChannelParams("erasure", q), p=p, n=1,
        code={"type": "arq", "k": k},
        adversary={"name": "iid_erasure", "p_target": p},
        transmitter_feedback=True,
    )
    est = sim.estimate_error(scenario, 100, 2024)
    ratio = est.mean_channel_uses / k
    target = 1 / ((1 - p) * (1 - q))
    assert target * 0.95 <= ratio <= target * 1.05
    assert est.errors == 0
    report(5, f"ARQ mean uses/k = {ratio:.4f}, target {target:.4f} within 5%")


def chunked_scenario(p, q, adversary):
    return sim.Scenario(
        channel=ChannelParams("erasure", q), p=p, n=32,
        code={"type": "chunked", "theta": 0.25, "num_messages": 4,
              "num_keys": 2, "code_seed": 7},
        adversary=adversary,
    )


def test_criterion_6_chunked_decoder():
    noisy = chunked_scenario(0.1, 0.05, {"name": "iid_erasure", "p_target": 0.1})
    est = sim.estimate_error(noisy, 500, 31)
    success = 1.0 - est.p_hat
    assert success >= 0.9
    clean = chunked_scenario(0.0, 0.0, {"name": "passive"})
    est_clean = sim.estimate_error(clean, 500, 32)
    assert est_clean.p_hat == 0.0
    report(6, f"chunked decode success {success:.3f} >= 0.9; noiseless success = 1.0")


def test_criterion_7_attack_indistinguishability():
    # (a) + (c): erasure push against a small random code above capacity
    p, q, n = 0.4, 0.3, 20
    scenario = sim.Scenario(
        channel=ChannelParams("erasure", q), p=p, n=n,
        code={"type": "random", "num_messages": 16, "num_keys": 1, "code_seed": 3},
        adversary={"name": "wait_snoop_push", "epsilon": 0.05},
    )
    rate = math.log2(16) / n
    assert rate > cap.capacity_erasure(p, q)
    confusions = 0
    for i in range(2000):
        out = sim.run_trial(scenario, sim.trial_seed(777, i))
        if out.events.get("confusion_success"):
            confusions += 1
            assert out.events["push_consistent"]  # y consistent with both codewords
    assert confusions > 0
    # (b) exact kernel equality at push disagreement positions
    for q_flip in (0.0, 0.1, 0.25, 0.4):
        law_x, law_xp = adv.push_flip_kernel(q_flip)
        for y in (0, 1):
            assert law_x[y] == law_xp[y]
    report(7, f"push consistency 100% over {confusions} confusion events (>0 of 2000); "
              "flip kernel P(y|x2) = P(y|x2') exactly")


class SpyWrapper:
    def __init__(self, inner, n):
        self.inner = inner
        self.n = n
        self.violation = False
        self.events = getattr(inner, "events", {})

    def act(self, info, rng):
        if len(info.x_prefix) != info.k + 1 or len(info.y_prefix) != info.k:
            self.violation = True
        return self.inner.act(info, rng)


def test_criterion_8_budget_and_causality():
    rng_global = np.random.default_rng(2)
    configs = []
    for p, q, p_target in [(0.1, 0.05, 0.1), (0.3, 0.2, 0.5), (0.5, 0.0, 1.0)]:
        configs.append(("erasure", p, q, adv.IidErasureAdversary, (p_target,)))
    checked = 0
    for kind, p, q, factory, args in configs:
        params = ChannelParams(kind, q)
        for trial in range(100):
            n = 40
            bits = [int(b) for b in rng_global.integers(0, 2, n)]
            spy = SpyWrapper(factory(*args), n)
            tr = run_transmission(lambda k, y, r: bits[k], spy, params, p, n,
                                  make_streams(trial))
            assert tr.adversary_actions_used <= math.floor(p * n)
            assert sum(1 for a in tr.a if a) <= math.floor(p * n)
            assert not spy.violation
            checked += 1
    # snoop attack transcripts obey the same invariants
    code_sc = sim.Scenario(
        channel=ChannelParams("erasure", 0.3), p=0.4, n=20,
        code={"type": "random", "num_messages": 16, "num_keys": 1, "code_seed": 3},
        adversary={"name": "wait_snoop_push", "epsilon": 0.05},
    )
    code = sim.build_code(code_sc)
    for trial in range(200):
        streams = make_streams((43, trial))
        u = int(streams.encoder.integers(0, 16))
        word = list(code.codeword(u, 0))
        spy = SpyWrapper(sim.build_adversary(code_sc, code), 20)
        tr = run_transmission(lambda k, y, r: word[k], spy, code_sc.channel,
                              0.4, 20, streams, code=code)
        assert tr.adversary_actions_used <= math.floor(0.4 * 20)
        assert not spy.violation
        checked += 1
    report(8, f"{checked} transcripts: zero budget violations, zero causality violations")
