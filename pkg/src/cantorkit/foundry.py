"""Constructions of normal-style numbers and their bases.

The building block: for b >= 2 put mass 1/2^b on each digit 0..b-1 and the
leftover (2^b - b)/2^b on the digit b.  The word V(b, w) lists every
length-w block over {0..b} in lexicographic order, each block repeated
2^(bw) * (its product mass) times -- an integer, (2^b - b)^(number of
b-digits).  Total length w * 2^(bw).

Nothing at a real construction stage is ever materialized: indices live in
big integers and digits come from weighted-lexicographic unranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .seqcore import (BasicSeq, Formula, SEQ_REGISTRY, SpecError,
                      HypothesisError)
from .digitstream import DigitStream, UNKNOWN
from .psi import psi_map


def nu_mass(b: int, digits: Sequence[int]) -> Fraction:
    """Product mass of a digit block under the stage-b distribution."""
    if b < 2:
        raise SpecError(f"stage parameter b = {b} < 2")
    m = Fraction(1)
    for d in digits:
        if d < 0:
            raise SpecError(f"negative digit {d}")
        if d < b:
            m *= Fraction(1, 2 ** b)
        elif d == b:
            m *= Fraction(2 ** b - b, 2 ** b)
        else:
            return Fraction(0)
    return m


def block_repeats(b: int, digits: Sequence[int]) -> int:
    """2^(b * len) * nu_mass: how often the block repeats inside V(b, w)."""
    r = nu_mass(b, digits) * 2 ** (b * len(digits))
    assert r.denominator == 1
    return r.numerator


def vbw_length(b: int, w: int) -> int:
    return w * 2 ** (b * w)


def _wgt(b: int, d: int) -> int:
    return 1 if d < b else 2 ** b - b


def vbw_unrank(b: int, w: int, rep: int) -> list[int]:
    """Digits of the block owning 0-based repetition index `rep`.

    Repetitions are ordered: all repeats of the lexicographically first
    block, then the next block, and so on; `rep` ranges over [0, 2^(bw)).
    """
    if not 0 <= rep < 2 ** (b * w):
        raise SpecError(f"repetition index {rep} out of range")
    digits = []
    wp = 1   # product of weights of chosen digits
    for s in range(1, w + 1):
        rem = w - s
        for d in range(b + 1):
            c = wp * _wgt(b, d) * 2 ** (b * rem)
            if rep < c:
                digits.append(d)
                wp *= _wgt(b, d)
                break
            rep -= c
    return digits


def vbw_rank(b: int, w: int, digits: Sequence[int]) -> int:
    """Number of repetitions preceding this block's first repetition."""
    if len(digits) != w:
        raise SpecError("block length mismatch")
    rank = 0
    wp = 1
    for s, d in enumerate(digits, start=1):
        if not 0 <= d <= b:
            raise SpecError(f"digit {d} outside [0, {b}]")
        rem = w - s
        for lower in range(d):
            rank += wp * _wgt(b, lower) * 2 ** (b * rem)
        wp *= _wgt(b, d)
    return rank


def vbw_locate(b: int, w: int, idx: int) -> tuple[list[int], int]:
    """(block digits, 0-based offset) of the 1-based position idx in V(b, w)."""
    if not 1 <= idx <= vbw_length(b, w):
        raise SpecError(f"index {idx} outside V({b},{w})")
    rep, off = divmod(idx - 1, w)
    return vbw_unrank(b, w, rep), off


def vbw_digit(b: int, w: int, idx: int) -> int:
    block, off = vbw_locate(b, w, idx)
    return block[off]


def vbw_count(b: int, w: int, value: int, idx: int) -> int:
    """Occurrences of `value` among positions 1..idx of V(b, w).

    Walks the same greedy descent as unranking, charging each skipped
    subtree its exact occurrence total: a subtree of R repetitions with a
    fixed prefix contributes R * (occurrences in the prefix) plus the
    weighted completions, m * wgt(value) * 2^(b(m-1)) per unit prefix
    weight over m free positions.
    """
    if not 0 <= idx <= vbw_length(b, w):
        raise SpecError(f"index {idx} outside V({b},{w})")
    if idx == 0:
        return 0
    rep, off = divmod(idx - 1, w)
    total = 0
    wp = 1
    prefix_cnt = 0
    r = rep
    digits = []
    for s in range(1, w + 1):
        rem = w - s
        for d in range(b + 1):
            sub = wp * _wgt(b, d) * 2 ** (b * rem)
            if r < sub:
                digits.append(d)
                wp *= _wgt(b, d)
                prefix_cnt += d == value
                break
            # whole subtree (prefix + digit d + free completions) precedes
            reps_here = sub
            cnt_here = reps_here * (prefix_cnt + (d == value))
            if rem:
                cnt_here += wp * _wgt(b, d) * rem * _wgt(b, value) * 2 ** (b * (rem - 1))
            total += cnt_here
            r -= sub
    # r is now the repetition index within the current block
    total += r * sum(1 for d in digits if d == value)
    total += sum(1 for d in digits[:off + 1] if d == value)
    return total


def vbw_blocks(b: int, w: int) -> Iterator[tuple[list[int], int]]:
    """All blocks in lexicographic order with their repeat counts."""
    import itertools
    for block in itertools.product(range(b + 1), repeat=w):
        yield list(block), block_repeats(b, block)


def vbw_digits_iter(b: int, w: int, limit: int) -> Iterator[int]:
    """First `limit` digits of V(b, w), sequentially (test-sized limits)."""
    produced = 0
    for block, reps in vbw_blocks(b, w):
        for _ in range(min(reps, (limit - produced) // w + 2)):
            for d in block:
                yield d
                produced += 1
                if produced >= limit:
                    return


# ---------------------------------------------------------------------------
# staged words (the MFF glue)

class Word:
    """A finite digit word with big-integer length."""

    length: int

    def digit(self, idx: int) -> int:    # 1-based
        raise NotImplementedError


class ExplicitWord(Word):
    def __init__(self, digits: Sequence[int]):
        self._digits = [int(d) for d in digits]
        self.length = len(self._digits)

    def digit(self, idx: int) -> int:
        return self._digits[idx - 1]


class VbwWord(Word):
    def __init__(self, b: int, w: int):
        self.b, self.w = b, w
        self.length = vbw_length(b, w)

    def digit(self, idx: int) -> int:
        return vbw_digit(self.b, self.w, idx)


@dataclass
class MFFStage:
    i: int
    base_entry: int          # b_i: the base value across this stage
    word: Word               # X_i: digits repeated l_i times
    repeats: int             # l_i


class StagedConstruction:
    """Base entries s_n = b_i and digits X_i^(l_i), stage i covering
    (L_{i-1}, L_i] with L_i = L_{i-1} + l_i * |X_i|.

    Stages are supplied lazily (a generator of MFFStage); an epsilon
    schedule (default 1/i) feeds the prefix-negligibility diagnostic
    L_{i-1} <= eps_i * L_i.
    """

    def __init__(self, stage_iter, eps=lambda i: Fraction(1, i)):
        self._iter = iter(stage_iter)
        self._stages: list[MFFStage] = []
        self._bounds: list[int] = [0]
        self.eps = eps

    def _ensure(self, n: int):
        while self._bounds[-1] < n:
            st = next(self._iter)
            if st.repeats < 0 or st.word.length <= 0:
                raise SpecError("stage with empty word or negative repeats")
            self._stages.append(st)
            self._bounds.append(self._bounds[-1] + st.repeats * st.word.length)

    def stage_at(self, n: int) -> tuple[MFFStage, int]:
        """(stage, 1-based offset into the repeated word) for index n."""
        if n < 1:
            raise SpecError(f"index {n} < 1")
        self._ensure(n)
        import bisect
        k = bisect.bisect_left(self._bounds, n)
        st = self._stages[k - 1]
        off = n - self._bounds[k - 1]
        return st, (off - 1) % st.word.length + 1

    def base_entry(self, n: int) -> int:
        st, _ = self.stage_at(n)
        return st.base_entry

    def digit(self, n: int) -> int:
        st, off = self.stage_at(n)
        return st.word.digit(off)

    def prefix_negligible(self, upto_stage: int) -> list[tuple[int, bool]]:
        out = []
        for k, st in enumerate(self._stages[:upto_stage]):
            if k == 0:
                continue
            ok = self._bounds[k] * 1 <= self.eps(st.i) * self._bounds[k + 1]
            out.append((st.i, bool(ok)))
        return out


class StagedSeq(BasicSeq):
    kind = "staged"

    def __init__(self, construction: StagedConstruction, label: str):
        self.construction = construction
        self.label = label

    def q(self, n: int) -> int:
        return self.construction.base_entry(n)

    def describe(self) -> dict:
        return {"kind": self.label}


# ---------------------------------------------------------------------------
# the distribution-normal witness (base + digits)

def _qnex_stages(first_stage: int = 6,
                 b_of=lambda i: 2 ** i,
                 w_of=lambda i: i * i,
                 l_of=lambda i: 2 ** (4 * i * i)) -> Iterator[MFFStage]:
    i = first_stage
    while True:
        yield MFFStage(i=i, base_entry=b_of(i), word=VbwWord(i, w_of(i)),
                       repeats=l_of(i))
        i += 1


def qnex_pair(first_stage: int = 6, b_of=None, w_of=None, l_of=None
              ) -> tuple[BasicSeq, DigitStream]:
    """The staged base (entries 2^i on stage i) together with the digit
    stream whose digits walk V(i, i^2) repeated 2^(4 i^2) times per stage.

    Keyword overrides shrink the stages for tests; defaults start at
    stage 6 (earlier stages have length zero).
    """
    kwargs = {}
    if b_of:
        kwargs["b_of"] = b_of
    if w_of:
        kwargs["w_of"] = w_of
    if l_of:
        kwargs["l_of"] = l_of
    cons = StagedConstruction(_qnex_stages(first_stage, **kwargs))
    seq = StagedSeq(cons, "qnex")
    stream = DigitStream(seq, cons.digit, canonicity=UNKNOWN, label="qnex")
    return seq, stream


# ---------------------------------------------------------------------------
# the restricted-distribution-normal witness

def rdn_class_size(i: int) -> int:
    return i * 2 ** (i ** 3) - i * i * 2 ** (i ** 3 - i)


def rdn_entry(i: int, t: int, full_count: Optional[int] = None,
              w: Optional[int] = None) -> tuple[int, int, int]:
    """(w, q, y) at position t of stage i.

    w is the V(i, i^2) digit.  Positions with w < i keep the small base
    q = i and the digit y = w.  Positions with w = i are split, in order
    of occurrence, into i classes of equal size: the first class gets the
    large base i^3 (digit ratio ~ 0 there), class j >= 2 gets
    floor(i^2/(j-1)) (digit ratio in the (j-1)-th cell).
    """
    if w is None:
        w = vbw_digit(i, i * i, t)
    if w < i:
        return w, i, w
    r = full_count if full_count is not None else vbw_count(i, i * i, i, t)
    j = (r - 1) // rdn_class_size(i) + 1
    if j > i:
        raise AssertionError("class index overflow: counts do not divide")
    if j == 1:
        return w, i ** 3, 0
    return w, (i * i) // (j - 1), j - 1


def _rdn_stages(first_stage: int = 6, l_of=lambda i: 2 ** (4 * i * i),
                w_of=lambda i: i * i):
    """Stage words for the base Q (entries) and the digits y, kappa-side."""
    i = first_stage
    while True:
        wlen = w_of(i)

        class _QWord(Word):
            def __init__(self, i=i, wlen=wlen):
                self.i, self.length = i, vbw_length(i, wlen)
                self.wlen = wlen

            def digit(self, idx):
                return rdn_entry(self.i, idx, w=vbw_digit(self.i, self.wlen, idx),
                                 full_count=None if vbw_digit(self.i, self.wlen, idx) < self.i
                                 else vbw_count(self.i, self.wlen, self.i, idx))[1]

        class _YWord(Word):
            def __init__(self, i=i, wlen=wlen):
                self.i, self.length = i, vbw_length(i, wlen)
                self.wlen = wlen

            def digit(self, idx):
                return rdn_entry(self.i, idx, w=vbw_digit(self.i, self.wlen, idx),
                                 full_count=None if vbw_digit(self.i, self.wlen, idx) < self.i
                                 else vbw_count(self.i, self.wlen, self.i, idx))[2]

        yield (MFFStage(i=i, base_entry=0, word=_QWord(), repeats=l_of(i)),
               MFFStage(i=i, base_entry=i, word=_YWord(), repeats=l_of(i)))
        i += 1


class RdnSeq(BasicSeq):
    """The restricted-distribution-normality base: stage words Q_i^(l_i)."""

    kind = "rdn"

    def __init__(self, first_stage: int = 6, l_of=None, w_of=None):
        kw = {}
        if l_of:
            kw["l_of"] = l_of
        if w_of:
            kw["w_of"] = w_of
        self._first = first_stage
        self._cons = StagedConstruction(
            s for s, _ in _rdn_stages(first_stage, **kw))

    def q(self, n: int) -> int:
        st, off = self._cons.stage_at(n)
        return st.word.digit(off)

    def describe(self) -> dict:
        return {"kind": "rdn", "first_stage": self._first}


def rdn_kappa(first_stage: int = 6, l_of=None, w_of=None
              ) -> tuple[BasicSeq, DigitStream]:
    """The companion point kappa over the small staged base (entries i)."""
    kw = {}
    if l_of:
        kw["l_of"] = l_of
    if w_of:
        kw["w_of"] = w_of
    cons = StagedConstruction(y for _, y in _rdn_stages(first_stage, **kw))
    seq = StagedSeq(cons, "rdn-kappa-base")
    stream = DigitStream(seq, cons.digit, canonicity=UNKNOWN, label="rdn-kappa")
    return seq, stream


def rdn_walk(i: int, count: int) -> Iterator[tuple[int, int, int, int]]:
    """(t, w, q, y) for t = 1..count of stage i, sequentially.

    Walks V(i, i^2) block by block keeping a running tally of w = i
    occurrences, so it is fast for desk-check sized counts.
    """
    cls = rdn_class_size(i)
    t = 0
    seen_i = 0
    w = i * i
    for block, reps in vbw_blocks(i, w):
        for _ in range(reps):
            for d in block:
                t += 1
                if d < i:
                    yield t, d, i, d
                else:
                    seen_i += 1
                    j = (seen_i - 1) // cls + 1
                    if j == 1:
                        yield t, d, i ** 3, 0
                    else:
                        yield t, d, (i * i) // (j - 1), j - 1
                if t >= count:
                    return


def rdn_count_identities(i: int) -> dict:
    """Computed-vs-formula counting identities for the stage word W_i."""
    w = i * i
    length = vbw_length(i, w)
    formula = {
        "length": w * 2 ** (i * w),
        "count_small": i * i * 2 ** (i ** 3 - i),      # each alpha < i
        "count_large": i * i * 2 ** (i ** 3) - i ** 3 * 2 ** (i ** 3 - i),
        "class_size": rdn_class_size(i),
    }
    computed = {
        "length": length,
        "count_small": vbw_count(i, w, 0, length),
        "count_large": vbw_count(i, w, i, length),
        "divisible": formula["count_large"] % i == 0,
        "classes_cover": formula["class_size"] * i == formula["count_large"],
    }
    return {"formula": formula, "computed": computed}


def delta_cell(ratio: Fraction, i: int) -> int:
    """Index alpha of the cell [alpha/i, (alpha+1)/i) containing the ratio."""
    a = (ratio.numerator * i) // ratio.denominator
    return min(a, i - 1)


def in_delta_check(i: int, alpha: int) -> bool:
    """alpha/i <= i / floor(i^2/alpha) < (alpha+1)/i, the cell-landing fact."""
    q = (i * i) // alpha
    return alpha * q <= i * i < (alpha + 1) * q


def rdn_measure_log10():
    """log10 of the measure lower bound for the restricted witness set.

    Only stages 6..9 contribute (2^t < t^3 exactly there); each contributes
    (2^t/t^3) per large-base position, and there are
    2^(4 t^2) * (t 2^(t^3) - t^2 2^(t^3 - t)) of those.
    """
    import mpmath
    with mpmath.workprec(200):
        total = mpmath.mpf(0)
        for t in range(6, 10):
            count = 2 ** (4 * t * t) * (t * 2 ** (t ** 3) - t * t * 2 ** (t ** 3 - t))
            total += mpmath.mpf(count) * (t * mpmath.log(2, 10) - 3 * mpmath.log(t, 10))
        return total


# ---------------------------------------------------------------------------
# counterexample transforms between normality notions

def nnotdn_base(q_seq: BasicSeq, log_base: Optional[float] = None) -> BasicSeq:
    """p_n = max(floor(log q_n), 2); natural log unless overridden."""
    if log_base is None:
        f = lambda n: max(int(math.floor(math.log(q_seq.q(n)))), 2)
    else:
        lb = math.log(log_base)
        f = lambda n: max(int(math.floor(math.log(q_seq.q(n)) / lb)), 2)
    return Formula(f, label="floor-log")


def nnotdn_pair(q_seq: BasicSeq, stream: DigitStream,
                log_base: Optional[float] = None) -> tuple[BasicSeq, DigitStream]:
    """Round trip through the much smaller base: digits min(E_n, p_n - 1),
    read back over Q.  Destroys digit-ratio equidistribution while the
    block counts move by O(1) per block."""
    p_seq = nnotdn_base(q_seq, log_base)
    down = psi_map(stream, p_seq)
    return p_seq, psi_map(down, q_seq)


def rnnotn_base(q_seq: BasicSeq) -> BasicSeq:
    """p_n = max(floor(q_n/2), 2): halve the bases."""
    return Formula(lambda n: max(q_seq.q(n) // 2, 2), label="half")


def rnnotn_pair(q_seq: BasicSeq, stream_over_p: DigitStream
                ) -> tuple[BasicSeq, DigitStream]:
    """Read a point of the halved base inside Q.  Since p_n <= q_n the
    clamp never fires: counts transfer exactly, but the position weights
    differ by the factor the ratio report exposes."""
    p_seq = rnnotn_base(q_seq)
    return p_seq, psi_map(stream_over_p, q_seq)


def dnnotrn_pair(q_seq: BasicSeq, stream: DigitStream
                 ) -> tuple[BasicSeq, DigitStream]:
    """p_n = q_n - 1 and y with digits min(E_n, q_n - 2) + 1: never a zero
    digit, yet the shifted orbits of x and y stay within ~1/q_n."""
    p_seq = Formula(lambda n: q_seq.q(n) - 1, label="q-1")
    for n in (1, 2, 3):
        if q_seq.q(n) < 3:
            raise HypothesisError("dnnotrn needs q_n >= 3")
    out = DigitStream(q_seq, lambda n: min(stream.digit(n), q_seq.q(n) - 2) + 1,
                      e0=stream.e0, canonicity=UNKNOWN, label="dnnotrn")
    return p_seq, out


def orbit_closeness(x: DigitStream, y: DigitStream, n_max: int,
                    depth: int = 30) -> tuple[bool, Fraction]:
    """Check |T_n(x) - T_n(y)| <= 1/q_n for 1 <= n <= n_max.

    The difference is sum_{j>n} (y_j - x_j)/(q_{n+1}..q_j) with digit
    differences in {0, 1}; it is bracketed with `depth` exact terms plus
    the worst-case tail.  Returns (all bounds hold, max of q_n * upper
    bracket seen).
    """
    q = x.base
    worst = Fraction(0)
    ok = True
    x.digits(n_max + depth + 1)
    y.digits(n_max + depth + 1)
    for n in range(1, n_max + 1):
        lo = Fraction(0)
        prod = 1
        for j in range(n + 1, n + depth + 1):
            prod *= q.q(j)
            c = y.digit(j) - x.digit(j)
            if c not in (0, 1):
                raise SpecError("orbit closeness expects digit gaps in {0,1}")
            lo += Fraction(c, prod)
        hi = lo + Fraction(2, prod)   # tail of all-ones gaps is < 2/(prod)
        qn = q.q(n)
        worst = max(worst, qn * hi)
        if hi * qn > 1 and lo * qn <= 1:
            # bracket straddles: refine by doubling depth once
            lo2 = Fraction(0)
            prod2 = 1
            for j in range(n + 1, n + 2 * depth + 1):
                prod2 *= q.q(j)
                lo2 += Fraction(y.digit(j) - x.digit(j), prod2)
            hi = lo2 + Fraction(2, prod2)
            worst = max(worst, qn * hi)
        if hi * qn > 1:
            ok = False
    return ok, worst


SEQ_REGISTRY["rdn"] = RdnSeq
SEQ_REGISTRY["qnex"] = lambda **kw: qnex_pair(**kw)[0]
