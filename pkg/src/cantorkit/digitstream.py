"""Lazy digit streams for Cantor series expansions.

A point x is represented as an integer part e0 plus digits E_1, E_2, ...
with 0 <= E_n < q_n, so that x = e0 + sum E_n / (q_1...q_n).  The canonical
convention: E_n != q_n - 1 infinitely often.  Points with a terminating
expansion have a second, all-(q_n - 1)-tail representation; streams carry a
tag saying which form they are.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .seqcore import BasicSeq, SpecError

CANONICAL = "canonical"
TERMINATING = "terminating"
UNKNOWN = "unknown"


class DigitStream:
    """Digits over a basic sequence, memoized, indexed from 1.

    max_tail_start = k means digits are q_j - 1 for all j >= k (the
    non-canonical dual form of a terminating point); None otherwise.
    """

    def __init__(self, base: BasicSeq, rule: Callable[[int], int],
                 e0: int = 0, canonicity: str = UNKNOWN,
                 last_nonzero: Optional[int] = None,
                 max_tail_start: Optional[int] = None,
                 label: str = ""):
        self.base = base
        self._rule = rule
        self.e0 = int(e0)
        self.canonicity = canonicity
        self.last_nonzero = last_nonzero
        self.max_tail_start = max_tail_start
        self.label = label
        self._memo: list[int] = []
        self._lock = threading.Lock()

    def digit(self, n: int) -> int:
        if n < 1:
            raise SpecError(f"digit index {n} < 1")
        if n > len(self._memo):
            with self._lock:
                while len(self._memo) < n:
                    j = len(self._memo) + 1
                    d = self._rule(j)
                    q = self.base.q(j)
                    if not 0 <= d < q:
                        raise SpecError(f"digit E_{j} = {d} outside [0, {q})")
                    self._memo.append(d)
        return self._memo[n - 1]

    def digits(self, n: int) -> list[int]:
        self.digit(n) if n >= 1 else None
        return self._memo[:n]

    def __repr__(self):
        shown = ",".join(str(d) for d in self._memo[:8])
        return (f"DigitStream({self.label or self.base.kind}: {self.e0}."
                f"{shown}...; {self.canonicity})")


def from_digits(base: BasicSeq, digits: list[int], e0: int = 0) -> DigitStream:
    """Terminating stream: the given digits, then zeros forever."""
    digits = [int(d) for d in digits]
    last = 0
    for i, d in enumerate(digits):
        if not 0 <= d < base.q(i + 1):
            raise SpecError(f"digit {d} at position {i + 1} outside "
                            f"[0, {base.q(i + 1)})")
        if d:
            last = i + 1
    rule = lambda n: digits[n - 1] if n <= len(digits) else 0
    return DigitStream(base, rule, e0=e0, canonicity=TERMINATING,
                       last_nonzero=last if (last or e0) else 0)


def from_rule(base: BasicSeq, rule: Callable[[int], int], e0: int = 0,
              canonicity: str = UNKNOWN, label: str = "") -> DigitStream:
    return DigitStream(base, rule, e0=e0, canonicity=canonicity, label=label)


class RationalDigitStream(DigitStream):
    """Multiply-and-floor expansion of an exact rational.

    Remainders are kept so tails are exact: after n digits,
    x = e0 + sum_{j<=n} E_j/(q_1..q_j) + remainder_n/(q_1..q_n)
    with remainder_n in [0, 1).  Multiply-and-floor never produces an
    all-max tail, so the result is the canonical expansion; if some
    remainder hits 0 the expansion terminates and the tag says so.
    """

    def __init__(self, x: Fraction, base: BasicSeq):
        x = Fraction(x)
        e0 = x.numerator // x.denominator
        self._rems: list[Fraction] = [x - e0]
        self._terminated_at: Optional[int] = 0 if x == e0 else None
        super().__init__(base, self._next, e0=e0, canonicity=CANONICAL,
                         label=f"expand({x})")
        self.value = x
        if self._terminated_at is not None:
            self.canonicity = TERMINATING
            self.last_nonzero = 0

    def _next(self, n: int) -> int:
        # digits are materialized in order by DigitStream.digit
        r = self._rems[n - 1]
        q = self.base.q(n)
        d = (r.numerator * q) // r.denominator
        rn = r * q - d
        self._rems.append(rn)
        if rn == 0 and self._terminated_at is None:
            self._terminated_at = n
            self.canonicity = TERMINATING
            self.last_nonzero = n if d else self.last_nonzero
        return d

    def digit(self, n: int) -> int:
        d = super().digit(n)
        # keep last_nonzero honest once termination is known
        if self._terminated_at is not None and self.last_nonzero is None:
            self.last_nonzero = max(
                (i + 1 for i, v in enumerate(self._memo[:self._terminated_at]) if v),
                default=0)
        return d

    def remainder(self, n: int) -> Fraction:
        """Exact tail sum_{j>n} E_j/(q_{n+1}..q_j), in [0, 1)."""
        self.digit(n) if n >= 1 else None
        return self._rems[n]


def expand_rational(x, base: BasicSeq) -> RationalDigitStream:
    return RationalDigitStream(Fraction(x), base)


@dataclass
class Enclosure:
    lo: Fraction
    hi: Fraction

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi


def enclose_prefix(stream: DigitStream, n: int) -> Enclosure:
    """Exact interval containing the stream's value, from its first n digits."""
    if n < 0:
        raise SpecError(f"depth {n} < 0")
    lo = Fraction(stream.e0)
    prod = 1
    for j in range(1, n + 1):
        prod *= stream.base.q(j)
        lo += Fraction(stream.digit(j), prod)
    return Enclosure(lo, lo + Fraction(1, prod))


def stream_value(stream: DigitStream, depth: int = 64) -> Enclosure:
    """Value enclosure; exact (zero width) for terminating/rational streams."""
    if isinstance(stream, RationalDigitStream):
        return Enclosure(stream.value, stream.value)
    if stream.canonicity == TERMINATING and stream.last_nonzero is not None:
        e = enclose_prefix(stream, stream.last_nonzero)
        return Enclosure(e.lo, e.lo)
    if stream.max_tail_start is not None:
        # value = prefix + full tail mass = hi endpoint of the enclosure
        e = enclose_prefix(stream, stream.max_tail_start - 1)
        return Enclosure(e.hi, e.hi)
    return enclose_prefix(stream, depth)


def shift_T(stream: DigitStream, n: int, depth: Optional[int] = None) -> Enclosure:
    """The shifted tail T_n(x) = (q_1..q_n) x mod 1 = sum_{j>n} E_j/(q_{n+1}..q_j).

    Exact for rational-backed and terminating streams; otherwise an
    enclosure from `depth` further digits (default n + 40 total: the tail
    width is at most 2^-(depth), plenty for comparisons).
    """
    if isinstance(stream, RationalDigitStream):
        r = stream.remainder(n)
        return Enclosure(r, r)
    if stream.canonicity == TERMINATING and stream.last_nonzero is not None:
        lo = Fraction(0)
        prod = 1
        for j in range(n + 1, max(n, stream.last_nonzero) + 1):
            prod *= stream.base.q(j)
            lo += Fraction(stream.digit(j), prod)
        return Enclosure(lo, lo)
    if depth is None:
        depth = 40
    lo = Fraction(0)
    prod = 1
    for j in range(n + 1, n + depth + 1):
        prod *= stream.base.q(j)
        lo += Fraction(stream.digit(j), prod)
    return Enclosure(lo, lo + Fraction(1, prod))


def detect_max_tail(stream: DigitStream, window: int = 256) -> Optional[int]:
    """Smallest k such that E_j = q_j - 1 for all j in [k, window].

    Window evidence only: a return value k with k <= window means the
    materialized digits show an all-max run covering the whole window tail.
    Returns None when the last window digit is not maximal.
    """
    if stream.max_tail_start is not None:
        return stream.max_tail_start
    k = window + 1
    for j in range(window, 0, -1):
        if stream.digit(j) == stream.base.q(j) - 1:
            k = j
        else:
            break
    return k if k <= window else None


def canonicalize(stream: DigitStream, window: int = 256) -> DigitStream:
    """Convert between the two representations of a terminating point.

    Terminating form  ->  dual form ending in q_j - 1 forever.
    Detected all-max tail  ->  terminating form.
    Streams with neither property are returned unchanged (the caller can
    compare identity to see nothing happened).
    """
    base = stream.base
    if stream.canonicity == TERMINATING and stream.last_nonzero is not None:
        t = stream.last_nonzero
        head = stream.digits(t)
        if t == 0:
            e0, head = stream.e0 - 1, []
        else:
            e0 = stream.e0
            head = head[:-1] + [head[-1] - 1]

        def rule(n, head=head, t=t):
            return head[n - 1] if n <= t else base.q(n) - 1

        return DigitStream(base, rule, e0=e0, canonicity=UNKNOWN,
                           max_tail_start=t + 1, label="dual")
    k = detect_max_tail(stream, window)
    if k is not None:
        if k == 1:
            return from_digits(base, [], e0=stream.e0 + 1)
        head = stream.digits(k - 1)
        head = head[:-1] + [head[-1] + 1]
        return from_digits(base, head, e0=stream.e0)
    return stream


@dataclass
class RunReport:
    n: int
    digit_bound_ok: bool           # E_j < min(p_j, q_j) for all j <= n
    first_violation: Optional[int]
    longest_run_source: int        # longest run of E_j in {0, p_j - 1}
    longest_run_image: int         # same for image digits in {0, q_j - 1}
    member_at_level: Optional[int] # smallest k admitting x, None if bound fails


def rho_and_membership(stream: DigitStream, p_seq: BasicSeq, q_seq: BasicSeq,
                       k: Optional[int], n: int) -> RunReport:
    """Run statistics behind the bi-Lipschitz restriction domain.

    Scans E_1..E_n: checks E_j < min(p_j, q_j); measures the longest run of
    digits in {0, p_j - 1} on the source side and, for the digitwise image
    min(E_j, q_j - 1), the longest run in {0, q_j - 1}.  Membership at
    level k needs the bound plus both runs <= k.
    """
    ok = True
    first_bad = None
    run_s = run_i = best_s = best_i = 0
    for j in range(1, n + 1):
        e = stream.digit(j)
        p, q = p_seq.q(j), q_seq.q(j)
        if e >= min(p, q):
            ok = False
            if first_bad is None:
                first_bad = j
        run_s = run_s + 1 if e in (0, p - 1) else 0
        best_s = max(best_s, run_s)
        f = min(e, q - 1)
        run_i = run_i + 1 if f in (0, q - 1) else 0
        best_i = max(best_i, run_i)
    level = max(best_s, best_i) if ok else None
    return RunReport(n=n, digit_bound_ok=ok, first_violation=first_bad,
                     longest_run_source=best_s, longest_run_image=best_i,
                     member_at_level=level)
