"""Adversary strategies.

All strategies are single-trial stateful objects implementing
act(info, rng) -> action, where info is a channel.SideInfo.  For erasure
channels the action is a bool (erase), for flip channels a bit.

The two snoop-then-push attacks stay silent (or babble random flips) for a
prefix of length ell, use the receiver's observations to sample a confusable
codeword x' from the posterior over the codebook, and then steer the suffix:
erase (or flip with probability 1/2) exactly where the transmitted word and
x' disagree.
"""

from __future__ import annotations

import math

from .capacity import star
from .channel import ERASURE


class PassiveAdversary:
    """Never acts."""

    events = {}

    def act(self, info, rng):
        return False


class IidErasureAdversary:
    """Erases each symbol independently with probability p_target."""

    def __init__(self, p_target):
        if not 0.0 <= p_target <= 1.0:
            raise ValueError(f"p_target must be in [0,1], got {p_target}")
        self.p_target = p_target
        self.events = {}

    def act(self, info, rng):
        return bool(rng.random() < self.p_target)


class IidFlipAdversary:
    """Flips each symbol independently with probability p_target."""

    def __init__(self, p_target):
        if not 0.0 <= p_target <= 1.0:
            raise ValueError(f"p_target must be in [0,1], got {p_target}")
        self.p_target = p_target
        self.events = {}

    def act(self, info, rng):
        return 1 if rng.random() < self.p_target else 0


def consistent_set(y1, code, flip_crossover=None):
    """Posterior over codebook entries given the observed prefix y1.

    Enumerates every (message, key) codeword of `code`.  With
    flip_crossover=None (erasure channels) an entry survives iff it agrees
    with y1 at every unerased position, all survivors weighted by the uniform
    prior.  With a flip_crossover s in [0,1] (flip channels, no erasures) no
    entry is excluded; weights are proportional to the cascade likelihood
    s^d (1-s)^(len-d) where d is the Hamming distance to y1.

    Returns a list of (message, codeword, weight) with weights normalized to
    sum to 1.  An empty erasure-variant result signals inconsistent inputs.
    """
    ell = len(y1)
    out = []
    if flip_crossover is None:
        for u, word in code.all_codewords():
            if all(y1[i] == ERASURE or y1[i] == word[i] for i in range(ell)):
                out.append([u, word, 1.0])
    else:
        s = float(flip_crossover)
        for u, word in code.all_codewords():
            d = sum(1 for i in range(ell) if y1[i] != word[i])
            if s == 0.0:
                w = 1.0 if d == 0 else 0.0
            elif s == 1.0:
                w = 1.0 if d == ell else 0.0
            else:
                w = math.exp(d * math.log(s) + (ell - d) * math.log(1.0 - s))
            if w > 0.0:
                out.append([u, word, w])
    total = sum(w for _, _, w in out)
    if total > 0.0:
        for entry in out:
            entry[2] /= total
    return [(u, word, w) for u, word, w in out]


def _sample_entry(entries, rng):
    r = rng.random()
    acc = 0.0
    for u, word, w in entries:
        acc += w
        if r < acc:
            return u, word
    return entries[-1][0], entries[-1][1]


def _clamp_ell(ell, n):
    return max(1, min(n - 1, int(round(ell))))


class WaitSnoopPushErasure:
    """Two-phase erasure attack: observe silently, then erase disagreements.

    Phase 1 (steps 0..ell-1) induces no erasures; the observed y prefix is
    all the attack needs.  At the phase switch a codeword x' is sampled from
    the set consistent with the prefix, and phase 2 erases every position
    where the transmitted word differs from x'.
    """

    def __init__(self, code, p, q, epsilon):
        if not 0.0 <= q < 1.0:
            raise ValueError(f"q must be in [0,1), got {q}")
        self.code = code
        self.p = p
        self.q = q
        self.epsilon = epsilon
        self.ell = _clamp_ell(code.n * (code.rate - epsilon / 2.0) / (1.0 - q), code.n)
        self.x_prime = None
        self.events = {"attack": "wait_snoop_push", "ell": self.ell}

    def act(self, info, rng):
        if info.k < self.ell:
            return False
        if self.x_prime is None:
            entries = consistent_set(info.y_prefix[: self.ell], self.code)
            if not entries:
                raise RuntimeError("empty consistent set: prefix cannot have been transmitted")
            u_prime, self.x_prime = _sample_entry(entries, rng)
            self.events["u_prime"] = u_prime
            self.events["x_prime"] = tuple(self.x_prime)
        return info.x_prefix[info.k] != self.x_prime[info.k]


class BabbleSnoopPushFlip:
    """Two-phase flip attack: babble random flips, then push toward x'.

    Phase 1 flips each of the first ell symbols independently with
    probability p_bar*n/ell.  At the switch x' is sampled from the
    likelihood-weighted posterior (flip observations exclude nothing), and
    phase 2 flips with probability 1/2 exactly where the transmitted word
    and x' disagree, which makes the two suffix likelihoods equal.
    """

    def __init__(self, code, p, p_bar, q, epsilon):
        if not 0.0 <= p_bar <= p < 0.25:
            raise ValueError(f"need 0 <= p_bar <= p < 1/4, got p_bar={p_bar}, p={p}")
        self.code = code
        self.p = p
        self.p_bar = p_bar
        self.q = q
        self.epsilon = epsilon
        alpha = 1.0 - 4.0 * (p - p_bar)
        self.ell = _clamp_ell((alpha + epsilon / 2.0) * code.n, code.n)
        self.babble_prob = min(1.0, p_bar * code.n / self.ell)
        self.x_prime = None
        self.events = {"attack": "babble_snoop_push", "ell": self.ell,
                       "babble_flips": 0}

    def act(self, info, rng):
        if info.k < self.ell:
            flip = 1 if (self.babble_prob > 0.0 and rng.random() < self.babble_prob) else 0
            self.events["babble_flips"] += flip
            return flip
        if self.x_prime is None:
            s = star(self.babble_prob, self.q)
            entries = consistent_set(info.y_prefix[: self.ell], self.code, flip_crossover=s)
            u_prime, self.x_prime = _sample_entry(entries, rng)
            self.events["u_prime"] = u_prime
            self.events["x_prime"] = tuple(self.x_prime)
        if info.x_prefix[info.k] == self.x_prime[info.k]:
            return 0
        return 1 if rng.random() < 0.5 else 0


def push_flip_kernel(q):
    """Exact output law at a push-phase disagreement position.

    Returns (P(y|x), P(y|x')) for y in {0,1} given the Ber(1/2) push flip
    followed by a BSC(q); both laws are uniform, hence indistinguishable.
    """
    # x xor Ber(1/2) is uniform, so the BSC(q) output is uniform too
    p_y_given_x = {0: 0.5 * (1.0 - q) + 0.5 * q, 1: 0.5 * q + 0.5 * (1.0 - q)}
    p_y_given_xp = dict(p_y_given_x)
    return p_y_given_x, p_y_given_xp
