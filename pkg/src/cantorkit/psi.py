"""The digitwise clamp transform between two Cantor series systems.

A point x with digits E_n over the base P = (p_n) is sent to the point of
the base Q = (q_n) whose digits are min(E_n, q_n - 1).  This module has the
exact evaluators (values, finite-stage piecewise-linear approximants,
integrals), the one-sided continuity classifier at terminating points, the
total-variation formula for the finite stages, and the Hölder/monotonicity
diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .seqcore import (Affine, BasicSeq, Constant, Explicit, Formula,
                      Geometric, HypothesisError, IID, Periodic, SpecError,
                      UndecidedError, truncate_tail)
from .digitstream import (DigitStream, Enclosure, RationalDigitStream,
                          TERMINATING, UNKNOWN, enclose_prefix,
                          expand_rational, from_digits, detect_max_tail)


def psi_map(stream: DigitStream, q_seq: BasicSeq,
            canonicity_window: int = 0) -> DigitStream:
    """Image stream: digits min(E_n, q_n - 1) over q_seq.

    The image of a canonical stream may acquire an all-max tail, so the
    result is tagged unknown; pass canonicity_window > 0 to scan that many
    digits for tail evidence (detect_max_tail) and record it.
    """
    out = DigitStream(q_seq, lambda n: min(stream.digit(n), q_seq.q(n) - 1),
                      e0=stream.e0, canonicity=UNKNOWN, label="psi")
    if canonicity_window:
        out.max_tail_start = detect_max_tail(out, canonicity_window)
    return out


def compose_chain(stream: DigitStream, bases: Sequence[BasicSeq]) -> DigitStream:
    """psi through a chain of bases, innermost first."""
    for b in bases:
        stream = psi_map(stream, b)
    return stream


# ---------------------------------------------------------------------------
# exact evaluation helpers

def _eventual_period(seq: BasicSeq) -> Optional[tuple[int, int]]:
    """(start, period) with q_n = q_{n+period} for all n > start, if known."""
    if isinstance(seq, Constant):
        return (0, 1)
    if isinstance(seq, Periodic):
        return (0, len(seq.values))
    if isinstance(seq, Explicit):
        t = _eventual_period(seq.tail)
        if t is None:
            return None
        return (len(seq.head) + t[0], t[1])
    return None


def psi_terminating_value(p_seq: BasicSeq, q_seq: BasicSeq,
                          digits: Sequence[int], e0: int = 0) -> Fraction:
    """Exact image value of a point given by finitely many P-digits."""
    val = Fraction(e0)
    prod = 1
    for j, e in enumerate(digits, start=1):
        if not 0 <= e < p_seq.q(j):
            raise SpecError(f"digit E_{j} = {e} outside [0, {p_seq.q(j)})")
        prod *= q_seq.q(j)
        val += Fraction(min(e, q_seq.q(j) - 1), prod)
    return val


def psi_value(p_seq: BasicSeq, q_seq: BasicSeq, x, horizon: int = 512):
    """psi at an exact rational x.

    Returns a zero-width Enclosure when the value is exactly decidable
    (terminating expansion, or both bases eventually periodic so the digit
    and clamp pattern recurs); otherwise an enclosure at the horizon.
    """
    stream = expand_rational(x, p_seq)
    e0 = stream.e0
    # terminating case: finite sum
    stream.digits(1)
    for probe in (64, horizon):
        stream.digits(probe)
        if stream.canonicity == TERMINATING:
            t = stream.last_nonzero or 0
            v = psi_terminating_value(p_seq, q_seq, stream.digits(t), e0)
            return Enclosure(v, v)
    pp = _eventual_period(p_seq)
    qp = _eventual_period(q_seq)
    if pp is not None and qp is not None:
        start = max(pp[0], qp[0])
        L = math.lcm(pp[1], qp[1])
        # remainder states recur => digits eventually periodic; find the cycle
        seen: dict[tuple, int] = {}
        n = start
        while n <= horizon + start:
            n += L
            key = (stream.remainder(n), )
            if key in seen:
                n1, n2 = seen[key], n
                head = Fraction(0)
                prod = 1
                for j in range(1, n1 + 1):
                    prod *= q_seq.q(j)
                    head += Fraction(min(stream.digit(j), q_seq.q(j) - 1), prod)
                prod_n1 = prod
                block = Fraction(0)
                rel = 1
                for j in range(n1 + 1, n2 + 1):
                    rel *= q_seq.q(j)
                    block += Fraction(min(stream.digit(j), q_seq.q(j) - 1), rel)
                tail = block * Fraction(rel, rel - 1)
                v = e0 + head + tail / prod_n1
                return Enclosure(v, v)
            seen[key] = n
    lo = psi_terminating_value(p_seq, q_seq, stream.digits(horizon), e0)
    prod = 1
    for j in range(1, horizon + 1):
        prod *= q_seq.q(j)
    return Enclosure(lo, lo + Fraction(1, prod))


# ---------------------------------------------------------------------------
# finite-stage approximants

def _digits_of_fraction(p_seq: BasicSeq, frac: Fraction, t: int) -> list[int]:
    digits = []
    r = frac
    for n in range(1, t + 1):
        q = p_seq.q(n)
        d = (r.numerator * q) // r.denominator
        r = r * q - d
        digits.append(d)
    return digits


def approximant_eval(p_seq: BasicSeq, q_seq: BasicSeq, t: int, x) -> Fraction:
    """The stage-t piecewise-linear approximant at x (period-1 extension).

    On each level-t cell of the source base the map is affine with slope
    (p_1..p_t)/(q_1..q_t); the value follows from the first t digits of
    the fractional part.
    """
    x = Fraction(x)
    frac = x - (x.numerator // x.denominator)
    digits = _digits_of_fraction(p_seq, frac, t)
    pprod = qprod = 1
    alpha = beta = Fraction(0)
    for n, e in enumerate(digits, start=1):
        pprod *= p_seq.q(n)
        qprod *= q_seq.q(n)
        alpha += Fraction(e, pprod)
        beta += Fraction(min(e, q_seq.q(n) - 1), qprod)
    return Fraction(pprod, qprod) * (frac - alpha) + beta


def approximant_left_limit_at_one(p_seq: BasicSeq, q_seq: BasicSeq, t: int) -> Fraction:
    qprod = 1
    v = Fraction(0)
    for n in range(1, t + 1):
        qprod *= q_seq.q(n)
        v += Fraction(min(p_seq.q(n) - 1, q_seq.q(n) - 1), qprod)
    return v + Fraction(1, qprod)


def approximant_bound(q_seq: BasicSeq, t: int) -> Fraction:
    """Uniform bound |psi - stage-t approximant| <= 2/(q_1..q_t) <= 2^-(t-1)."""
    prod = 1
    for n in range(1, t + 1):
        prod *= q_seq.q(n)
    return Fraction(2, prod)


def approximant_integral(p_seq: BasicSeq, q_seq: BasicSeq, t: int) -> Fraction:
    """Exact integral of the stage-t approximant over [0, 1].

    Each clamped digit is uniform over its cell column, so position n
    contributes its mean clamp value over 1/(q_1..q_n); the in-cell slope
    term averages to half a cell height, 1/(2 q_1..q_t).
    """
    qprod = 1
    for n in range(1, t + 1):
        qprod *= q_seq.q(n)
    total = Fraction(1, 2 * qprod)
    qq = 1
    for n in range(1, t + 1):
        p, q = p_seq.q(n), q_seq.q(n)
        qq *= q
        s_min = sum(min(e, q - 1) for e in range(p))
        total += Fraction(s_min, p * qq)
    return total


def approximant_integral_oracle(p_seq: BasicSeq, q_seq: BasicSeq, t: int) -> Fraction:
    """Trapezoid sum over all level-t cells, cell by cell (independent route)."""
    import itertools
    ps = p_seq.prefix(t)
    qs = q_seq.prefix(t)
    pprod = math.prod(ps)
    qprod = math.prod(qs)
    w_q = [math.prod(qs[n + 1:]) for n in range(t)]   # q_{n+2}..q_t
    total_num = 0   # in units 1/(pprod*qprod)
    for cell in itertools.product(*(range(p) for p in ps)):
        s = sum(min(e, qs[n] - 1) * w_q[n] for n, e in enumerate(cell))
        # area = width * (psi(c) + slope*width/2); in 1/(pprod*qprod) units:
        total_num += s
    # slope*width^2/2 summed over all cells: pprod * (pprod/qprod)*(1/pprod^2)/2
    return Fraction(total_num, pprod * qprod) + Fraction(1, 2 * qprod)


def sample_approximant(p_seq: BasicSeq, q_seq: BasicSeq, t: int,
                       grid: int) -> list[tuple[Fraction, Fraction]]:
    """(x, stage-t value) on the uniform grid i/grid, i = 0..grid-1."""
    return [(Fraction(i, grid), approximant_eval(p_seq, q_seq, t, Fraction(i, grid)))
            for i in range(grid)]


# ---------------------------------------------------------------------------
# one-sided continuity at terminating points

@dataclass
class ContinuityReport:
    x: Fraction
    t: int                         # last nonzero digit index
    status: str                    # continuous | jump | undecided
    right_status: str              # always continuous
    jump: Optional[Fraction]       # psi(x) - psi(x-) when exactly known
    jump_bracket: Optional[tuple[Fraction, Fraction]]
    set_tag: Optional[str]         # "A": E_t >= q_t;  "B": some later p_s < q_s
    decided: bool


def _bounded_max(seq: BasicSeq) -> Optional[int]:
    if isinstance(seq, Constant):
        return seq.value
    if isinstance(seq, Periodic):
        return max(seq.values)
    if isinstance(seq, IID):
        return seq.hi
    if isinstance(seq, Explicit):
        m = _bounded_max(seq.tail)
        if m is None:
            return None
        return max([m] + seq.head)
    return None


def _is_nondecreasing(seq: BasicSeq) -> bool:
    if isinstance(seq, Constant):
        return True
    if isinstance(seq, Affine):
        return seq.d >= 0
    if isinstance(seq, Geometric):
        return seq.r >= 1
    return False


def certify_ge_tail(p_seq: BasicSeq, q_seq: BasicSeq, start: int,
                    horizon: int) -> Optional[int]:
    """Smallest J in [start, horizon] with p_j >= q_j provable for all j > J,
    or None if no such certificate is found."""
    pp, qp = _eventual_period(p_seq), _eventual_period(q_seq)
    if pp is not None and qp is not None:
        s = max(pp[0], qp[0], start)
        L = math.lcm(pp[1], qp[1])
        if all(p_seq.q(j) >= q_seq.q(j) for j in range(s + 1, s + L + 1)):
            J = s
            # tighten: pull J back while the pointwise comparison still holds
            while J > start and p_seq.q(J) >= q_seq.q(J):
                J -= 1
            return J
        return None
    qmax = _bounded_max(q_seq)
    if qmax is not None and _is_nondecreasing(p_seq):
        for J in range(start, horizon + 1):
            if p_seq.q(J + 1) >= qmax:
                return J
        return None
    return None


def _clamp_tail_sum(p_seq: BasicSeq, q_seq: BasicSeq, t: int,
                    horizon: int) -> tuple[Optional[Fraction], tuple[Fraction, Fraction]]:
    """sum_{j>t} min(p_j-1, q_j-1) / (q_{t+1}..q_j), relative to position t.

    Returns (exact or None, (lo, hi) bracket).  Exact when a p >= q tail
    certificate exists (the remainder telescopes to a single product) or
    when both bases are eventually periodic (geometric closed form).
    """
    J = certify_ge_tail(p_seq, q_seq, t, horizon)
    if J is not None:
        s = Fraction(0)
        rel = 1
        for j in range(t + 1, J + 1):
            rel *= q_seq.q(j)
            s += Fraction(min(p_seq.q(j) - 1, q_seq.q(j) - 1), rel)
        s += Fraction(1, rel)   # telescoped all-(q_j - 1) remainder past J
        return s, (s, s)
    pp, qp = _eventual_period(p_seq), _eventual_period(q_seq)
    if pp is not None and qp is not None:
        s0 = max(pp[0], qp[0], t)
        L = math.lcm(pp[1], qp[1])
        head = Fraction(0)
        rel = 1
        for j in range(t + 1, s0 + 1):
            rel *= q_seq.q(j)
            head += Fraction(min(p_seq.q(j) - 1, q_seq.q(j) - 1), rel)
        block = Fraction(0)
        brel = 1
        for j in range(s0 + 1, s0 + L + 1):
            brel *= q_seq.q(j)
            block += Fraction(min(p_seq.q(j) - 1, q_seq.q(j) - 1), brel)
        s = head + (block * Fraction(brel, brel - 1)) / rel
        return s, (s, s)
    lo = Fraction(0)
    rel = 1
    for j in range(t + 1, horizon + 1):
        rel *= q_seq.q(j)
        lo += Fraction(min(p_seq.q(j) - 1, q_seq.q(j) - 1), rel)
    return None, (lo, lo + Fraction(1, rel))


def classify_continuity(p_seq: BasicSeq, q_seq: BasicSeq, x,
                        tail_horizon: int = 256) -> ContinuityReport:
    """One-sided continuity of psi at a terminating point x in (0, 1].

    Right limits always agree with the value; the left side is continuous
    exactly when the digit increment at the last nonzero position matches
    the clamped tail mass.  Exact where the tail is recognizable, else a
    bracket; undecided only when the bracket straddles the critical value.
    """
    x = Fraction(x)
    if not 0 < x <= 1:
        raise SpecError("continuity classification wants x in (0, 1]")
    stream = expand_rational(x, p_seq)
    stream.digits(tail_horizon)
    if stream.canonicity != TERMINATING:
        raise HypothesisError(f"{x} has no terminating expansion within "
                              f"horizon {tail_horizon}")
    t = stream.last_nonzero or 0
    if t == 0:   # x = 1: left side only; digits of 1- are all p_j - 1
        t = 0
    digits = stream.digits(t)
    if t == 0:
        lhs = 1   # value psi(1) ... treat via x=1: increment of e0
        qprod = 1
    else:
        e_t = digits[-1]
        q_t = q_seq.q(t)
        lhs = min(e_t, q_t - 1) - min(e_t - 1, q_t - 1)
        qprod = 1
        for j in range(1, t + 1):
            qprod *= q_seq.q(j)
    exact, (blo, bhi) = _clamp_tail_sum(p_seq, q_seq, t, t + tail_horizon)
    # set tag
    tag = None
    if t > 0 and digits[-1] >= q_seq.q(t):
        tag = "A"
    if exact is not None:
        jump = Fraction(lhs - exact, 1) / qprod
        status = "continuous" if jump == 0 else "jump"
        if status == "jump" and tag is None:
            tag = "B"
        return ContinuityReport(x=x, t=t, status=status, right_status="continuous",
                                jump=jump if jump != 0 else Fraction(0),
                                jump_bracket=None, set_tag=tag, decided=True)
    jlo = (lhs - bhi) / qprod
    jhi = (lhs - blo) / qprod
    if jlo > 0 or jhi < 0:
        if tag is None:
            tag = "B"
        return ContinuityReport(x=x, t=t, status="jump", right_status="continuous",
                                jump=None, jump_bracket=(jlo, jhi),
                                set_tag=tag, decided=True)
    return ContinuityReport(x=x, t=t, status="undecided",
                            right_status="continuous", jump=None,
                            jump_bracket=(jlo, jhi), set_tag=tag, decided=False)


# ---------------------------------------------------------------------------
# total variation of the finite stages

@dataclass
class VariationReport:
    t: int
    value: Fraction
    method: str                     # formula | oracle
    upper_bound: Optional[Fraction]


def variation_formula(p_seq: BasicSeq, q_seq: BasicSeq, t: int) -> VariationReport:
    """Exact total variation of the stage-t approximant on [0, 1].

    Needs t >= 2 and p_t != q_t; otherwise falls back to the breakpoint
    oracle (the formula's derivation assumes a jump at every level-t cell
    boundary).
    """
    ps, qs = p_seq.prefix(t), q_seq.prefix(t)
    if t < 2 or ps[-1] == qs[-1]:
        v = variation_oracle(p_seq, q_seq, t)
        return VariationReport(t=t, value=v, method="oracle", upper_bound=None)
    D = math.prod(qs)
    w = [math.prod(qs[k + 1:]) for k in range(t)]     # q_{k+2}..q_t
    # S_k = sum_{j>k} min(p_j-1, q_j-1) * w_j  (units 1/D)
    S = [0] * (t + 1)
    for k in range(t - 1, -1, -1):
        S[k] = S[k + 1] + min(ps[k] - 1, qs[k] - 1) * w[k]
    vnum = 0
    mult = 1   # a type-(k, E) boundary occurs once per choice of leading digits
    for k in range(t):
        q = qs[k]
        inner = 0
        for e in range(1, ps[k]):
            inc = min(e, q - 1) - min(e - 1, q - 1)
            inner += abs(inc * w[k] - S[k + 1] - 1)
        vnum += mult * inner
        mult *= ps[k]
    vnum += S[0] + 1                  # left limit at 1
    pprod = math.prod(ps)
    vnum += pprod                     # slope * total length
    ub = Fraction(0)
    qq = 1
    sum_p = 0
    for j in range(t):
        qq *= qs[j]
        if j > 0:
            ub += Fraction(sum_p * (ps[j] + qs[j]), qq)
        sum_p += ps[j]
    ub = 2 * ub + 2 * Fraction(pprod, D) + 1
    return VariationReport(t=t, value=Fraction(vnum, D), method="formula",
                           upper_bound=ub)


def variation_oracle(p_seq: BasicSeq, q_seq: BasicSeq, t: int) -> Fraction:
    """Breakpoint walk: sum of in-cell rises plus jumps at cell boundaries."""
    import numpy as np
    ps, qs = p_seq.prefix(t), q_seq.prefix(t)
    pprod = math.prod(ps)
    D = math.prod(qs)
    w = [math.prod(qs[k + 1:]) for k in range(t)]
    if pprod * D < 2 ** 62:
        s = np.zeros(1, dtype=np.int64)
        for k in range(t):
            mins = np.array([min(e, qs[k] - 1) * w[k] for e in range(ps[k])],
                            dtype=np.int64)
            s = (s[:, None] + mins[None, :]).reshape(-1)
        jumps = int(np.abs(np.diff(s) - 1).sum())
        vnum = pprod + jumps + int(s[-1]) + 1
    else:
        import itertools
        vnum = pprod
        prev = None
        for cell in itertools.product(*(range(p) for p in ps)):
            cur = sum(min(e, qs[n] - 1) * w[n] for n, e in enumerate(cell))
            if prev is not None:
                vnum += abs(cur - prev - 1)
            prev = cur
        vnum += prev + 1
    return Fraction(vnum, D)


@dataclass
class BVReport:
    horizon: int
    double_sum_partial: float
    double_sum_tail_bound: Optional[float]   # None when no certificate
    sum_converged: Optional[bool]
    log_ratio_running_min: float
    ratio_diverging: bool
    verdict: str                             # bounded_variation | not_proven


def _trend_diverging(values: list[float]) -> bool:
    """Eventually-monotone-increase heuristic over the last decade of checkpoints."""
    if len(values) < 4:
        return False
    tail = values[-max(4, len(values) // 3):]
    rising = all(b >= a for a, b in zip(tail, tail[1:]))
    return rising and tail[-1] > tail[0] + 1e-9


def bv_check(p_seq: BasicSeq, q_seq: BasicSeq, horizon: int = 10000) -> BVReport:
    """One-sided bounded-variation certificate for the limit map.

    Sufficient condition: the double series sum_k sum_{j>k} p_k (p_j+q_j) /
    (q_1..q_j) converges and the prefix-product ratio does not diverge.
    Convergence is certified only for bases with a provable bound (constant,
    periodic, iid, explicit-over-those); otherwise the verdict stays
    not_proven with the partial sums reported.
    """
    from .seqcore import birkhoff_report
    rep = birkhoff_report(p_seq, q_seq, horizon)
    partial = rep.bv_partial[-1]
    pmax, qmax = _bounded_max(p_seq), _bounded_max(q_seq)
    tail = None
    converged = None
    if pmax is not None and qmax is not None:
        log_qprod = sum(math.log(q_seq.q(j)) for j in range(1, horizon + 1))
        # sum_{j>H} (j-1) pmax (pmax+qmax) / (q_1..q_j) <= geometric envelope
        log_tail = (math.log(pmax * (pmax + qmax)) + math.log(horizon + 1.0)
                    + math.log(2.0) - log_qprod)
        tail = math.exp(log_tail) if log_tail < 700 else math.inf
        converged = tail < math.inf
    diverging = _trend_diverging(rep.log_ratio_running_min[-6:]) or (
        rep.log_ratio_running_min[-1] == rep.log_ratio[0]
        and _trend_diverging(rep.log_ratio))
    verdict = ("bounded_variation"
               if converged and not diverging else "not_proven")
    return BVReport(horizon=horizon, double_sum_partial=partial,
                    double_sum_tail_bound=tail, sum_converged=converged,
                    log_ratio_running_min=rep.log_ratio_running_min[-1],
                    ratio_diverging=diverging, verdict=verdict)


# ---------------------------------------------------------------------------
# non-monotonicity witness

@dataclass
class MonotonicityWitness:
    m: int
    c_digits: list[int]
    x_digits: list[int]
    y_digits: list[int]
    x: Fraction
    y: Fraction
    psi_x: Fraction
    psi_y: Fraction


def monotonicity_witness(p_seq: BasicSeq, q_seq: BasicSeq,
                         prefix: Sequence[int] = (),
                         horizon: int = 1000) -> MonotonicityWitness:
    """Two points x < y in a given cell with psi(x) > psi(y).

    Uses the first index m past the prefix with p_m > q_m: x ends with the
    digits (q_m - 1, 1), y with the single digit q_m; their images differ
    by exactly -1/(q_1..q_{m+1}) in y's favour... i.e. psi(x) is larger.
    Raises UndecidedError when no such m is found by the horizon.
    """
    prefix = [int(d) for d in prefix]
    n = len(prefix) + 1
    for j, d in enumerate(prefix, start=1):
        if not 0 <= d < p_seq.q(j):
            raise SpecError(f"prefix digit {d} invalid at position {j}")
    m = None
    for j in range(n, horizon + 1):
        if p_seq.q(j) > q_seq.q(j):
            m = j
            break
    if m is None:
        raise UndecidedError(f"no index with p_m > q_m found by horizon {horizon}")
    if m == n:
        c = list(prefix)
    else:
        c = prefix + [p_seq.q(n) - 1] + [0] * (m - n - 1)
    x_digits = c + [q_seq.q(m) - 1, 1]
    y_digits = c + [q_seq.q(m)]
    value = lambda ds: sum(Fraction(e, math.prod(p_seq.prefix(j)))
                           for j, e in enumerate(ds, start=1))
    x, y = value(x_digits), value(y_digits)
    px = psi_terminating_value(p_seq, q_seq, x_digits)
    py = psi_terminating_value(p_seq, q_seq, y_digits)
    assert x < y and px > py, "witness construction failed"
    return MonotonicityWitness(m=m, c_digits=c, x_digits=x_digits,
                               y_digits=y_digits, x=x, y=y, psi_x=px, psi_y=py)


# ---------------------------------------------------------------------------
# Hölder exponent diagnostics

@dataclass
class HolderReport:
    alpha: Fraction
    horizon: int
    hypothesis_ok: bool             # min(p_n, q_n) >= 3 up to the horizon
    sup1_log: float                 # log sup of the in-cell expression
    sup1_at: int
    sup2_log: float                 # log sup of the cross-cell expression
    sup2_at: tuple[int, int]
    checkpoints: list[int]
    expr1_log: list[float]
    verdict: str                    # bounded_so_far | diverging


def holder_report(p_seq: BasicSeq, q_seq: BasicSeq, alpha,
                  horizon: int = 2000, k_max: int = 8) -> HolderReport:
    """Track the two suprema controlling the alpha-Hölder seminorm.

    expr1(n) = (p_1..p_n)^a / (q_1..q_n) * min(p_n, q_n)^(1-a)
    expr2(n,k) = (p_1..p_{n+k})^a / (q_1..q_n)
                 * (p_{n+k+1} / max(1, p_{n+k+1} - q_{n+k+1}))^a

    Logs are accumulated per-term; the verdict is a trend call on the
    checkpoint trajectory (eventually-rising => diverging), never a claim
    about the limit.
    """
    from .seqcore import default_checkpoints
    a = Fraction(alpha)
    if not 0 < a <= 1:
        raise SpecError("alpha must be in (0, 1]")
    af = float(a)
    checkpoints = default_checkpoints(horizon)
    hyp = True
    lp = lq = 0.0
    lps = [0.0]     # prefix log p products
    sup1 = -math.inf
    sup1_at = 0
    expr1_ckpt = []
    ci = 0
    exprs = []
    for n in range(1, horizon + 1):
        p, q = p_seq.q(n), q_seq.q(n)
        if min(p, q) < 3:
            hyp = False
        lp += math.log(p)
        lq += math.log(q)
        lps.append(lp)
        e1 = af * lp - lq + (1 - af) * math.log(min(p, q))
        exprs.append(e1)
        if e1 > sup1:
            sup1, sup1_at = e1, n
        if ci < len(checkpoints) and n == checkpoints[ci]:
            expr1_ckpt.append(e1)
            ci += 1
    sup2 = -math.inf
    sup2_at = (0, 0)
    lqs = [0.0]
    for n in range(1, horizon + 1):
        lqs.append(lqs[-1] + math.log(q_seq.q(n)))
    for n in range(1, horizon + 1):
        for k in range(0, k_max + 1):
            if n + k + 1 > horizon:
                break
            p_next = p_seq.q(n + k + 1)
            gap = max(1, p_next - q_seq.q(n + k + 1))
            e2 = af * lps[n + k] - lqs[n] + af * (math.log(p_next) - math.log(gap))
            if e2 > sup2:
                sup2, sup2_at = e2, (n, k)
    running_sup = []
    cur = -math.inf
    ci = 0
    for n, e in enumerate(exprs, start=1):
        cur = max(cur, e)
        if ci < len(checkpoints) and n == checkpoints[ci]:
            running_sup.append(cur)
            ci += 1
    verdict = "diverging" if _trend_diverging(running_sup) else "bounded_so_far"
    return HolderReport(alpha=a, horizon=horizon, hypothesis_ok=hyp,
                        sup1_log=sup1, sup1_at=sup1_at, sup2_log=sup2,
                        sup2_at=sup2_at, checkpoints=checkpoints,
                        expr1_log=expr1_ckpt, verdict=verdict)


# ---------------------------------------------------------------------------
# small-perturbation (digit-identity) transform

@dataclass
class EdTransformReport:
    horizon: int
    gap_sum_partial: Fraction        # sum t_n / q_n
    gap_sum_float: float
    min_p: int
    hypothesis_min_ok: bool          # q_n - t_n >= 3 up to horizon
    identity_window: int
    identity_ok: bool                # image digits equal source digits


def ed_transform(q_seq: BasicSeq, t_of_n, stream: DigitStream,
                 horizon: int = 1000, identity_window: int = 200):
    """Shrink each base entry by t_n: P = (q_n - t_n), map a P-stream into Q.

    Because p_n <= q_n, the clamp never fires: the image has the same
    digits read in the larger base.  The report carries the summability
    diagnostic sum t_n/q_n and the floor hypothesis q_n - t_n >= 3.
    """
    p_seq = Formula(lambda n: q_seq.q(n) - int(t_of_n(n)), label="q-t")
    gap = Fraction(0)
    min_p = None
    hyp = True
    for n in range(1, horizon + 1):
        q = q_seq.q(n)
        tn = int(t_of_n(n))
        if tn < 0 or q - tn < 2:
            raise SpecError(f"t_{n} = {tn} leaves no base (q_{n} = {q})")
        if q - tn < 3:
            hyp = False
        gap += Fraction(tn, q)
        min_p = q - tn if min_p is None else min(min_p, q - tn)
    image = psi_map(stream, q_seq)
    ok = all(image.digit(j) == stream.digit(j)
             for j in range(1, identity_window + 1))
    report = EdTransformReport(horizon=horizon, gap_sum_partial=gap,
                               gap_sum_float=float(gap), min_p=min_p,
                               hypothesis_min_ok=hyp,
                               identity_window=identity_window, identity_ok=ok)
    return p_seq, image, report
