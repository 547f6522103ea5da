"""Chunked stochastic codes with the two-phase decoder, plus the ARQ scheme.

A chunked code concatenates 1/theta independently drawn sub-codes; each
sub-code maps (message, key) to a uniform random chunk of n*theta bits.
Decoding splits the received word at a chunk end t*: list-decode the prefix
by exhaustive consistency, then refine the list against the suffix.

The ARQ scheme (transmitter feedback, erasure channel) simply repeats each
message bit until it gets through unerased.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .channel import ERASURE, SideInfo, bec_step

RESULT_DECODED = "decoded"
RESULT_LIST_AMBIGUOUS = "list_ambiguous"
RESULT_NO_DECODING_POINT = "no_decoding_point"


@dataclass
class ChunkedCode:
    n: int
    theta: float
    num_chunks: int
    chunk_len: int
    num_messages: int
    num_keys: int
    # chunks[i] has shape (num_messages, num_keys, chunk_len), dtype uint8
    chunks: list

    @property
    def rate(self):
        return math.log2(self.num_messages) / self.n

    def chunk_word(self, i, u, key):
        if not (0 <= u < self.num_messages and 0 <= key < self.num_keys):
            raise ValueError(f"message {u} or key {key} out of range")
        return self.chunks[i][u, key]

    def all_codewords(self):
        """Yield (message, codeword) for every (message, key-sequence) pair."""
        for u in range(self.num_messages):
            for keys in itertools.product(range(self.num_keys), repeat=self.num_chunks):
                yield u, tuple(encode(self, u, keys))


def asymptotic_parameters(epsilon):
    """The large-n parameter choices (theta, key-rate) for target slack epsilon.

    Desk-scale runs pass theta / num_keys explicitly; these values only bind
    as the blocklength grows.
    """
    theta = epsilon / 4.0
    return theta, theta**3 / 8.0


def build_chunked_code(n, theta, num_messages, num_keys, rng):
    """Draw a chunked code: every chunk entry an independent uniform bit-string."""
    chunk_len = n * theta
    num_chunks = 1.0 / theta
    if abs(chunk_len - round(chunk_len)) > 1e-9 or abs(num_chunks - round(num_chunks)) > 1e-9:
        raise ValueError(f"n*theta and 1/theta must be integral (n={n}, theta={theta})")
    if num_messages < 2 or num_keys < 1:
        raise ValueError("need at least 2 messages and 1 key")
    chunk_len = int(round(chunk_len))
    num_chunks = int(round(num_chunks))
    chunks = [
        rng.integers(0, 2, size=(num_messages, num_keys, chunk_len), dtype=np.uint8)
        for _ in range(num_chunks)
    ]
    return ChunkedCode(n=n, theta=theta, num_chunks=num_chunks, chunk_len=chunk_len,
                       num_messages=num_messages, num_keys=num_keys, chunks=chunks)


def encode(code, u, keys):
    """Concatenate the per-chunk table entries for (u, keys)."""
    if len(keys) != code.num_chunks:
        raise ValueError(f"expected {code.num_chunks} keys, got {len(keys)}")
    out = []
    for i, key in enumerate(keys):
        out.extend(int(b) for b in code.chunk_word(i, u, key))
    return out


def chunked_code_to_json(code):
    """Serialize to a JSON document; chunk entries as hex strings."""
    def to_hex(bits):
        return "".join(str(int(b)) for b in bits)

    return json.dumps({
        "schema_version": 1,
        "n": code.n,
        "theta": code.theta,
        "num_messages": code.num_messages,
        "num_keys": code.num_keys,
        "chunks": [
            [[format(int(to_hex(code.chunks[i][u, s]), 2), "x")
              for s in range(code.num_keys)]
             for u in range(code.num_messages)]
            for i in range(code.num_chunks)
        ],
    })


def chunked_code_from_json(doc):
    data = json.loads(doc)
    n = data["n"]
    theta = data["theta"]
    num_messages = data["num_messages"]
    num_keys = data["num_keys"]
    chunk_len = int(round(n * theta))
    num_chunks = int(round(1.0 / theta))
    chunks = []
    for i in range(num_chunks):
        arr = np.zeros((num_messages, num_keys, chunk_len), dtype=np.uint8)
        for u in range(num_messages):
            for s in range(num_keys):
                bits = format(int(data["chunks"][i][u][s], 16), f"0{chunk_len}b")
                arr[u, s] = [int(b) for b in bits]
        chunks.append(arr)
    return ChunkedCode(n=n, theta=theta, num_chunks=num_chunks, chunk_len=chunk_len,
                       num_messages=num_messages, num_keys=num_keys, chunks=chunks)


@dataclass
class DecoderConfig:
    n: int
    rate: float
    theta: float
    p: float
    q: float
    delta: float
    chunk_ends: tuple

    @classmethod
    def for_code(cls, code, p, q, delta=None):
        if delta is None:
            delta = (1.0 / 16.0) * (1.0 - q) * code.theta**2
        ends = tuple(code.chunk_len * k for k in range(1, code.num_chunks))
        return cls(n=code.n, rate=code.rate, theta=code.theta, p=p, q=q,
                   delta=delta, chunk_ends=ends)


@dataclass
class DecodeOutcome:
    result: str
    message: int | None = None
    t_star: int | None = None
    list_size: int = 0
    refined_size: int = 0


def choose_decoding_point(erasure_counts, cfg):
    """Smallest chunk end satisfying the list-decoding and refinement conditions.

    erasure_counts maps each chunk end t to lambda_t, the total erasures
    observed up to time t.  The estimate lambda_t - q*t of adversarial
    erasures may be negative; the inequalities are evaluated as-is.
    """
    for t in cfg.chunk_ends:
        lam_hat = erasure_counts[t] - cfg.q * t
        list_cond = lam_hat <= t * (1.0 - cfg.q) * (1.0 - cfg.theta) - cfg.rate * cfg.n
        refine_cond = (cfg.n * cfg.p * (1.0 - cfg.q) - lam_hat
                       <= (cfg.n - t) * (1.0 - cfg.q) * (1.0 - cfg.theta) / 2.0)
        if list_cond and refine_cond:
            return t
    return None


def _chunk_consistent(code, i, u, y):
    """True iff some key's entry for chunk i agrees with y on unerased positions."""
    lo = i * code.chunk_len
    seg = y[lo:lo + code.chunk_len]
    obs = [(j, seg[j]) for j in range(code.chunk_len) if seg[j] != ERASURE]
    table = code.chunks[i][u]
    for s in range(code.num_keys):
        if all(table[s, j] == b for j, b in obs):
            return True
    return False


def two_phase_decode(y, code, cfg):
    """List-decode the prefix up to t*, then refine against the suffix."""
    if len(y) != code.n:
        raise ValueError(f"received word length {len(y)} != n={code.n}")
    counts = {}
    lam = 0
    for k, t in enumerate(range(code.chunk_len, code.n + 1, code.chunk_len)):
        lam += sum(1 for j in range((t - code.chunk_len), t) if y[j] == ERASURE)
        if t in cfg.chunk_ends:
            counts[t] = lam
    t_star = choose_decoding_point(counts, cfg)
    if t_star is None:
        return DecodeOutcome(result=RESULT_NO_DECODING_POINT)
    k = t_star // code.chunk_len
    listed = [u for u in range(code.num_messages)
              if all(_chunk_consistent(code, i, u, y) for i in range(k))]
    refined = [u for u in listed
               if all(_chunk_consistent(code, i, u, y) for i in range(k, code.num_chunks))]
    if len(refined) == 1:
        return DecodeOutcome(result=RESULT_DECODED, message=refined[0], t_star=t_star,
                             list_size=len(listed), refined_size=1)
    return DecodeOutcome(result=RESULT_LIST_AMBIGUOUS, t_star=t_star,
                         list_size=len(listed), refined_size=len(refined))


def right_mega_word(code, t, u, keys_right):
    k = t // code.chunk_len
    out = []
    for offset, key in enumerate(keys_right):
        out.extend(int(b) for b in code.chunk_word(k + offset, u, key))
    return out


def distance_condition_check(code, t, u_star, keys_right, listed):
    """Check the decoder's suffix-distance requirement for (u_star, keys_right).

    True iff the right mega sub-codeword is at Hamming distance at least
    (n-t)(1/2 - 3*theta/8) from every right mega sub-codeword of every other
    listed message, over all key sequences (exhaustive).
    """
    if t % code.chunk_len != 0 or not 0 < t < code.n:
        raise ValueError(f"t={t} is not a chunk end")
    k = t // code.chunk_len
    ref = right_mega_word(code, t, u_star, keys_right)
    threshold = (code.n - t) * (0.5 - 3.0 * code.theta / 8.0)
    for u in listed:
        if u == u_star:
            continue
        for keys in itertools.product(range(code.num_keys), repeat=code.num_chunks - k):
            other = right_mega_word(code, t, u, keys)
            d = sum(1 for a, b in zip(ref, other) if a != b)
            if d < threshold:
                return False
    return True


def arq_transmit(message_bits, p, q, max_n, adversary, streams):
    """Repeat each bit until it arrives unerased; stop at max_n channel uses.

    The adversary's erasures are clamped online so that at every prefix of
    length t they never exceed floor(p*t).  Returns (delivered, channel_uses).
    """
    k = len(message_bits)
    if max_n is None:
        max_n = int(math.ceil(4.0 * k / ((1.0 - p) * (1.0 - q)))) if p < 1.0 and q < 1.0 else 4 * k
    delivered = 0
    uses = 0
    used_erasures = 0
    x_hist, y_hist = [], []
    while delivered < k and uses < max_n:
        uses += 1
        xk = int(message_bits[delivered])
        x_hist.append(xk)
        info = SideInfo(k=uses - 1, x_prefix=tuple(x_hist), y_prefix=tuple(y_hist))
        want = bool(adversary.act(info, streams.adversary))
        erase = want and (used_erasures + 1 <= math.floor(p * uses))
        yk = bec_step(xk, erase, q, streams.channel)
        y_hist.append(yk)
        if erase:
            used_erasures += 1
        if yk != ERASURE:
            delivered += 1
    return delivered, uses
