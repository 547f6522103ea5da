"""Monte Carlo harness: trials, error-rate estimation, and parameter sweeps.

A Scenario pins down everything except randomness; (scenario, seed) then
fully determines a trial.  Per-trial substreams are derived from the base
seed and the trial index, so runs are reproducible and order-independent.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import adversary as adv
from . import codes
from .channel import ChannelParams, make_streams, run_transmission

SCHEMA_VERSION = 1

RESULT_COLUMNS = [
    "key", "channel", "q", "p", "n", "code", "adversary",
    "trials", "errors", "p_hat", "ci_low", "ci_high",
    "confusion_success", "budget_exhausted", "no_decoding_point",
    "list_ambiguous", "mean_channel_uses", "note",
]


class ScenarioError(ValueError):
    """Scenario file failed validation."""


@dataclass(frozen=True)
class Scenario:
    channel: ChannelParams
    p: float
    n: int
    code: dict
    adversary: dict
    transmitter_feedback: bool = False
    message: object = "uniform"  # "uniform" or a fixed message id

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "channel": {"kind": self.channel.kind, "q": self.channel.q},
            "p": self.p,
            "n": self.n,
            "code": dict(self.code),
            "adversary": dict(self.adversary),
            "transmitter_feedback": self.transmitter_feedback,
            "message": self.message,
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported schema_version {data.get('schema_version')!r}")
        for key in ("channel", "p", "n", "code", "adversary"):
            if key not in data:
                raise ScenarioError(f"scenario missing field {key!r}")
        try:
            channel = ChannelParams(kind=data["channel"]["kind"], q=float(data["channel"]["q"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad channel spec: {exc}") from exc
        p = float(data["p"])
        if not 0.0 <= p <= 1.0:
            raise ScenarioError(f"p={p} outside [0,1]")
        code = dict(data["code"])
        if code.get("type") not in ("chunked", "arq", "random"):
            raise ScenarioError(f"unknown code type {code.get('type')!r}")
        advspec = dict(data["adversary"])
        if "name" not in advspec:
            raise ScenarioError("adversary spec missing 'name'")
        return cls(channel=channel, p=p, n=int(data["n"]), code=code, adversary=advspec,
                   transmitter_feedback=bool(data.get("transmitter_feedback", False)),
                   message=data.get("message", "uniform"))


@dataclass
class RandomCode:
    """Flat stochastic code: one table (message, key) -> full-length codeword."""

    n: int
    num_messages: int
    num_keys: int
    table: np.ndarray  # shape (num_messages, num_keys, n)

    @property
    def rate(self):
        return math.log2(self.num_messages) / self.n

    def codeword(self, u, key):
        return tuple(int(b) for b in self.table[u, key])

    def all_codewords(self):
        for u in range(self.num_messages):
            for s in range(self.num_keys):
                yield u, self.codeword(u, s)


def build_random_code(n, num_messages, num_keys, rng):
    table = rng.integers(0, 2, size=(num_messages, num_keys, n), dtype=np.uint8)
    return RandomCode(n=n, num_messages=num_messages, num_keys=num_keys, table=table)


def build_code(scenario):
    spec = scenario.code
    rng = np.random.default_rng(np.random.SeedSequence(int(spec.get("code_seed", 0))))
    if spec["type"] == "chunked":
        return codes.build_chunked_code(scenario.n, float(spec["theta"]),
                                        int(spec["num_messages"]), int(spec["num_keys"]), rng)
    if spec["type"] == "random":
        return build_random_code(scenario.n, int(spec["num_messages"]),
                                 int(spec["num_keys"]), rng)
    return None  # arq carries raw bits, no codebook


def build_adversary(scenario, code):
    spec = scenario.adversary
    name = spec["name"]
    if name == "passive":
        return adv.PassiveAdversary()
    if name == "iid_erasure":
        return adv.IidErasureAdversary(float(spec["p_target"]))
    if name == "iid_flip":
        return adv.IidFlipAdversary(float(spec["p_target"]))
    if name == "wait_snoop_push":
        return adv.WaitSnoopPushErasure(code, scenario.p, scenario.channel.q,
                                        float(spec.get("epsilon", 0.05)))
    if name == "babble_snoop_push":
        return adv.BabbleSnoopPushFlip(code, scenario.p, float(spec.get("p_bar", 0.0)),
                                       scenario.channel.q, float(spec.get("epsilon", 0.05)))
    raise ScenarioError(f"unknown adversary {name!r}")


@dataclass
class TrialOutcome:
    success: bool
    result: str
    events: dict = field(default_factory=dict)
    actions_used: int = 0
    budget: int = 0
    budget_violations: int = 0
    channel_uses: int = 0


def _pick_message(scenario, code, rng):
    if scenario.message == "uniform":
        return int(rng.integers(0, code.num_messages))
    u = int(scenario.message)
    if not 0 <= u < code.num_messages:
        raise ScenarioError(f"fixed message {u} out of range")
    return u


def _check_push_consistency(transcript, x_prime):
    """After a push, y must agree with both codewords on unerased positions."""
    from .channel import ERASURE
    for xk, xpk, yk in zip(transcript.x, x_prime, transcript.y):
        if yk == ERASURE:
            continue
        if yk != xk or yk != xpk:
            return False
    return True


def run_trial(scenario, seed):
    """One deterministic trial of the scenario."""
    streams = make_streams(seed)
    if scenario.code["type"] == "arq":
        k = int(scenario.code["k"])
        bits = [int(b) for b in streams.encoder.integers(0, 2, size=k)]
        advobj = build_adversary(scenario, None)
        max_n = scenario.code.get("max_n")
        delivered, uses = codes.arq_transmit(bits, scenario.p, scenario.channel.q,
                                             max_n, advobj, streams)
        ok = delivered == k
        return TrialOutcome(success=ok, result="delivered" if ok else "truncated",
                            channel_uses=uses, events=dict(advobj.events))

    code = build_code(scenario)
    u = _pick_message(scenario, code, streams.encoder)
    if scenario.code["type"] == "chunked":
        keys = tuple(int(s) for s in streams.encoder.integers(0, code.num_keys,
                                                              size=code.num_chunks))
        word = codes.encode(code, u, keys)
    else:
        key = int(streams.encoder.integers(0, code.num_keys))
        word = list(code.codeword(u, key))

    def encoder(k, y_prefix, rng):
        return word[k]

    advobj = build_adversary(scenario, code)
    transcript = run_transmission(encoder, advobj, scenario.channel, scenario.p,
                                  scenario.n, streams, code=code,
                                  feedback=scenario.transmitter_feedback)
    events = dict(transcript.events)
    if "u_prime" in events:
        x_prime = events["x_prime"]
        ell = events["ell"]
        disagree = sum(1 for j in range(ell, scenario.n) if word[j] != x_prime[j])
        events["suffix_disagreements"] = disagree
        confusion = events["u_prime"] != u and disagree <= transcript.budget
        events["confusion_success"] = confusion
        if confusion and scenario.channel.kind == "erasure":
            events["push_consistent"] = _check_push_consistency(transcript, x_prime)
    events["budget_exhausted"] = transcript.budget_violations > 0

    if scenario.code["type"] == "chunked":
        cfg = codes.DecoderConfig.for_code(code, scenario.p, scenario.channel.q)
        outcome = codes.two_phase_decode(transcript.y, code, cfg)
        success = outcome.result == codes.RESULT_DECODED and outcome.message == u
        return TrialOutcome(success=success, result=outcome.result, events=events,
                            actions_used=transcript.adversary_actions_used,
                            budget=transcript.budget,
                            budget_violations=transcript.budget_violations)
    # random-code scenarios have no decoder; they exist to study attacks
    return TrialOutcome(success=True, result="attack_only", events=events,
                        actions_used=transcript.adversary_actions_used,
                        budget=transcript.budget,
                        budget_violations=transcript.budget_violations)


def trial_seed(base_seed, index):
    """Counter-keyed substream: non-overlapping across trial indices."""
    return np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(index),))


def wilson_interval(errors, trials, z=1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = errors / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # guard against round-off pushing the bounds past p_hat or [0, 1]
    return min(phat, max(0.0, center - half)), max(phat, min(1.0, center + half))


@dataclass
class ErrorEstimate:
    trials: int
    errors: int
    p_hat: float
    ci_low: float
    ci_high: float
    event_counts: dict = field(default_factory=dict)
    mean_channel_uses: float = 0.0


def _run_one(args):
    scenario, base_seed, i = args
    return run_trial(scenario, trial_seed(base_seed, i))


def max_workers():
    try:
        return max(1, int(os.environ.get("ADVCHAN_THREADS", "1")))
    except ValueError:
        return 1


def estimate_error(scenario, num_trials, base_seed, workers=None):
    """Estimate the error probability over num_trials independent trials."""
    if num_trials < 1:
        raise ValueError("num_trials must be >= 1")
    if workers is None:
        workers = max_workers()
    jobs = [(scenario, base_seed, i) for i in range(num_trials)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, jobs, chunksize=32))
    else:
        outcomes = [_run_one(job) for job in jobs]

    errors = sum(1 for o in outcomes if not o.success)
    counts = {"confusion_success": 0, "budget_exhausted": 0,
              "no_decoding_point": 0, "list_ambiguous": 0}
    uses = 0
    for o in outcomes:
        if o.events.get("confusion_success"):
            counts["confusion_success"] += 1
        if o.events.get("budget_exhausted"):
            counts["budget_exhausted"] += 1
        if o.result == codes.RESULT_NO_DECODING_POINT:
            counts["no_decoding_point"] += 1
        if o.result == codes.RESULT_LIST_AMBIGUOUS:
            counts["list_ambiguous"] += 1
        uses += o.channel_uses
    lo, hi = wilson_interval(errors, num_trials)
    return ErrorEstimate(trials=num_trials, errors=errors, p_hat=errors / num_trials,
                         ci_low=lo, ci_high=hi, event_counts=counts,
                         mean_channel_uses=uses / num_trials)


def apply_delta(scenario, delta):
    """Apply a flat override dict (dotted keys for nested fields) to a scenario."""
    data = scenario.to_dict()
    for key, value in delta.items():
        parts = key.split(".")
        node = data
        for part in parts[:-1]:
            node = node[part]
        node[parts[-1]] = value
    return Scenario.from_dict(data)


def sweep(scenario, deltas, trials_per_point, base_seed, workers=None):
    """One ErrorEstimate per grid point; per-point failures recorded, sweep continues."""
    if not deltas:
        raise ValueError("sweep grid must be non-empty")
    rows = []
    for i, delta in enumerate(deltas):
        key = ";".join(f"{k}={v}" for k, v in sorted(delta.items())) or f"point{i}"
        try:
            point = apply_delta(scenario, delta)
            est = estimate_error(point, trials_per_point, base_seed, workers=workers)
            rows.append((key, point, est, ""))
        except Exception as exc:  # recorded, not fatal
            rows.append((key, None, None, f"error: {exc}"))
    return rows


def results_rows(rows):
    """Flatten sweep output into the frozen CSV column order."""
    out = []
    for key, scenario, est, note in rows:
        if est is None:
            out.append({col: "" for col in RESULT_COLUMNS} | {"key": key, "note": note})
            continue
        out.append({
            "key": key,
            "channel": scenario.channel.kind,
            "q": scenario.channel.q,
            "p": scenario.p,
            "n": scenario.n,
            "code": scenario.code["type"],
            "adversary": scenario.adversary["name"],
            "trials": est.trials,
            "errors": est.errors,
            "p_hat": f"{est.p_hat:.10g}",
            "ci_low": f"{est.ci_low:.10g}",
            "ci_high": f"{est.ci_high:.10g}",
            "confusion_success": est.event_counts.get("confusion_success", 0),
            "budget_exhausted": est.event_counts.get("budget_exhausted", 0),
            "no_decoding_point": est.event_counts.get("no_decoding_point", 0),
            "list_ambiguous": est.event_counts.get("list_ambiguous", 0),
            "mean_channel_uses": f"{est.mean_channel_uses:.10g}",
            "note": note,
        })
    return out


def write_results_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        for row in results_rows(rows):
            writer.writerow(row)
