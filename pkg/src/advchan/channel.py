"""Per-step channel laws and the interactive transmission loop.

The loop enforces the causality contract: at step k the adversary sees the
transmitted prefix x[0..k] (including the current symbol), the receiver's
past observations y[0..k-1], and nothing else.  Actions beyond the weight
budget floor(p*n) are coerced to no-action and counted as violations.

Symbols are small ints: 0, 1, and ERASURE (=-1) for the erasure channel
output alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ERASURE = -1

KIND_ERASURE = "erasure"
KIND_FLIP = "flip"


@dataclass(frozen=True)
class ChannelParams:
    kind: str  # KIND_ERASURE or KIND_FLIP
    q: float

    def __post_init__(self):
        if self.kind not in (KIND_ERASURE, KIND_FLIP):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        hi = 1.0 if self.kind == KIND_ERASURE else 0.5
        if not 0.0 <= self.q <= hi:
            raise ValueError(f"q={self.q} outside [0, {hi}] for {self.kind}")


@dataclass
class Transcript:
    """Everything one transmission produced, plus budget bookkeeping."""

    n: int
    x: list
    a: list  # adversary actions: bools (erase) or bits (flip)
    y: list
    adversary_actions_used: int
    budget: int
    budget_violations: int = 0
    events: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SideInfo:
    """Causal view handed to the adversary at step k (0-indexed)."""

    k: int
    x_prefix: tuple  # x[0..k], current symbol included
    y_prefix: tuple  # y[0..k-1]
    code: object = None


@dataclass
class TrialStreams:
    """Named RNG substreams so each party's randomness is independently reproducible."""

    channel: np.random.Generator
    adversary: np.random.Generator
    encoder: np.random.Generator


def make_streams(seed):
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    ch, adv, enc = seed.spawn(3)
    return TrialStreams(
        channel=np.random.default_rng(ch),
        adversary=np.random.default_rng(adv),
        encoder=np.random.default_rng(enc),
    )


def bec_step(x, erase, q, rng):
    """One erasure-channel use.  An adversarial erasure dominates the BEC draw."""
    if erase:
        return ERASURE
    if q > 0.0 and rng.random() < q:
        return ERASURE
    return x


def bsc_step(x, a, q, rng):
    """One flip-channel use: x xor a, then a Ber(q) channel flip."""
    out = (x ^ a) & 1
    if q > 0.0 and rng.random() < q:
        out ^= 1
    return out


def run_transmission(encoder, adversary, params, p, n, streams, code=None,
                     feedback=False):
    """Drive one n-step transmission and return the Transcript.

    encoder(k, y_prefix_or_None, rng) -> bit.  y_prefix is passed only when
    feedback is enabled (closed-loop encoding); otherwise None.

    adversary must provide act(info, rng) -> action, where action is a bool
    (erase) for erasure channels or a bit for flip channels.
    """
    budget = int(np.floor(p * n))
    x, a, y = [], [], []
    used = 0
    violations = 0
    for k in range(n):
        xk = int(encoder(k, tuple(y) if feedback else None, streams.encoder))
        x.append(xk)
        info = SideInfo(k=k, x_prefix=tuple(x), y_prefix=tuple(y), code=code)
        action = adversary.act(info, streams.adversary)
        active = bool(action)
        if active and used >= budget:
            action = False if params.kind == KIND_ERASURE else 0
            active = False
            violations += 1
        if active:
            used += 1
        a.append(action)
        if params.kind == KIND_ERASURE:
            y.append(bec_step(xk, bool(action), params.q, streams.channel))
        else:
            y.append(bsc_step(xk, int(action), params.q, streams.channel))
    return Transcript(
        n=n, x=x, a=a, y=y,
        adversary_actions_used=used,
        budget=budget,
        budget_violations=violations,
        events=dict(getattr(adversary, "events", {})),
    )
