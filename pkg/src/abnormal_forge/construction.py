"""Digit-interleaving construction with machine-checkable certificates.

The pipeline copies blocks of seed partial quotients and, after each
block, inserts four chosen digits. The first three force the convergent
denominator three steps later to be an exact power of the scheduled
base (coprimization, a prime-with-primitive-root search in a residue
class, then a discrete logarithm); the fourth is a tail digit so large
that the number's base-b digits are pinned to b-1 over a long window.
Every block emits a :class:`BlockCertificate` that an independent
verifier can check against nothing but the digit stream itself.

Scale warning, recorded here because it shapes the API: the power-hit
exponent k is a discrete logarithm, distributed essentially uniformly
below the prime modulus. The denominator after block i therefore has
about as many BITS as the VALUE of block i's modulus, so block i+1
works modulo numbers whose size is exponential in block i's. Block 1
is cheap for any desk-scale seed; blocks beyond the first exceed any
conceivable budget (the searches and tables are exponential in the
accumulated size) and fail with explicit resource errors rather than
hanging. The budgets below make those failures fast and diagnosable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import nt
from .cf import convergent_stream, log2_fixed
from .errors import InputFormatError, ResourceBudgetExceeded, SearchExhausted
from .radix import NON_TERMINATING, base_expansion

MODE_PAPER = "paper"
MODE_RELAXED = "relaxed"
MODE_TOY = "toy"


@dataclass(frozen=True)
class Mode:
    """Tail-digit policy.

    ``paper``   - full bound: the tail exceeds base**(k**2), pinning the
                  number's first k**2 base digits to the convergent's
                  repeating tail.
    ``relaxed`` - tail is base**ceil(scale*k) + 1; exploration only, the
                  verifier reports whether the full bound happened to be
                  met.
    ``toy``     - tail is 2; structural checks only.
    """

    kind: str
    scale: Fraction | None = None

    def __post_init__(self):
        if self.kind not in (MODE_PAPER, MODE_RELAXED, MODE_TOY):
            raise ValueError(f"unknown mode {self.kind!r}")
        if self.kind == MODE_RELAXED:
            if self.scale is None or self.scale <= 0:
                raise ValueError("relaxed mode needs a positive scale")
        elif self.scale is not None:
            raise ValueError(f"mode {self.kind!r} takes no scale")

    @staticmethod
    def parse(text: str) -> "Mode":
        if text == MODE_PAPER:
            return Mode(MODE_PAPER)
        if text == MODE_TOY:
            return Mode(MODE_TOY)
        if text.startswith(MODE_RELAXED + ":"):
            return Mode(MODE_RELAXED, Fraction(text.split(":", 1)[1]))
        raise ValueError(
            f"mode must be 'paper', 'relaxed:<scale>' or 'toy', got {text!r}")

    def label(self) -> str:
        if self.kind == MODE_RELAXED:
            return f"relaxed:{self.scale}"
        return self.kind


@dataclass(frozen=True)
class SearchBudget:
    """Effort and memory caps for the per-block searches.

    ``tail_bits`` caps the size of a materialized tail digit;
    ``bsgs_entries`` caps the discrete-log table; ``factor_effort``
    bounds rho iterations when factoring group orders.
    """

    artin_limit: int = 100_000
    bsgs_entries: int = 1 << 24
    factor_effort: int = 1 << 22
    tail_bits: int = 1 << 31

    @staticmethod
    def from_mem_bytes(mem: int) -> "SearchBudget":
        """Derive caps from a single memory budget in bytes."""
        if mem < 1024:
            raise ValueError("memory budget below 1 KiB is unusable")
        return SearchBudget(bsgs_entries=max(1024, mem // 96),
                            tail_bits=mem * 8)


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class ConstructionConfig:
    block_size: int
    blocks: int
    mode: Mode
    tail_offset: int = 0
    budget: SearchBudget = field(default_factory=SearchBudget)

    def __post_init__(self):
        if self.block_size < 2 or self.block_size % 2:
            raise ValueError(
                f"block size must be an even integer >= 2, got {self.block_size}")
        if self.blocks < 0:
            raise ValueError(f"block count must be >= 0, got {self.blocks}")
        if self.tail_offset < 0:
            raise ValueError(f"tail offset must be >= 0, got {self.tail_offset}")

    def echo(self) -> dict:
        return {"block_size": self.block_size, "blocks": self.blocks,
                "mode": self.mode.label(), "tail_offset": self.tail_offset,
                "artin_limit": self.budget.artin_limit,
                "bsgs_entries": self.budget.bsgs_entries,
                "factor_effort": self.budget.factor_effort,
                "tail_bits": self.budget.tail_bits}


def _nth_nonsquare(n: int) -> int:
    r = math.isqrt(n)
    return n + (r if n <= r * r + r else r + 1)


def base_schedule(i: int) -> int:
    """i-th scheduled base: block j of the schedule lists the first j non-squares.

    The sequence starts 2, 2, 3, 2, 3, 5, 2, 3, 5, 6, ... so every
    non-square base recurs infinitely often. Square bases are never
    scheduled; digit statistics in a square base are tied to those in
    its non-square root base, so nothing is lost.
    """
    if i < 1:
        raise ValueError(f"schedule index must be >= 1, got {i}")
    j = 1
    total = 0
    while total + j < i:
        total += j
        j += 1
    return _nth_nonsquare(i - total)


def block_boundary(block_size: int, i: int) -> int:
    """Stream index of the last seed digit of block i: 2**(i-1) * N + 4(i-1)."""
    if block_size < 2 or block_size % 2:
        raise ValueError("block size must be even and >= 2")
    if i < 1:
        raise ValueError(f"block index must be >= 1, got {i}")
    return (1 << (i - 1)) * block_size + 4 * (i - 1)


def seed_block(source, i: int, block_size: int) -> list[int]:
    """Seed digits forming block i: N digits for i = 1, then doubling lengths."""
    if i < 1:
        raise ValueError(f"block index must be >= 1, got {i}")
    length = block_size if i == 1 else (1 << (i - 2)) * block_size
    return source.next_digits(length)


def pure_power_exponent(n: int, base: int) -> int | None:
    """The e with base**e = n, or None if n is not a pure power of base."""
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    if n < 1:
        return None
    if n == 1:
        return 0
    if base == 2:
        e = n.bit_length() - 1
        return e if n == 1 << e else None
    scaled_log_base = log2_fixed(base, 1, 64)
    estimate = ((n.bit_length() - 1) << 64) // scaled_log_base
    for e in range(max(estimate - 1, 1), estimate + 3):
        if base**e == n:
            return e
    return None


def digit_count_bound(q3: int, base: int) -> int:
    """Exponent of the power q3 = base**k, bounding the meaningful digit count.

    The convergent numerator paired with q3 is coprime to the base, so
    the finite expansion has exactly k digits; k is used directly rather
    than trimming.
    """
    e = pure_power_exponent(q3, base)
    if e is None or e < 1:
        raise ValueError(f"{q3} is not a positive power of {base}")
    return e


def ilog_floor(x: int, base: int) -> int:
    """Largest t >= 0 with base**t <= x, for x >= 1."""
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if base == 2:
        return x.bit_length() - 1
    scaled_log_base = log2_fixed(base, 1, 64)
    t = ((x.bit_length() - 1) << 64) // scaled_log_base
    while nt.pow_exceeds(base, t, x):  # base**t > x: too far
        t -= 1
    while not nt.pow_exceeds(base, t + 1, x):  # base**(t+1) <= x: can grow
        t += 1
    return t


def tail_digit(bound_exponent: int, base: int, mode: Mode, *,
               offset: int = 0, max_bits: int = DEFAULT_BUDGET.tail_bits) -> int:
    """Fourth inserted digit for a block whose power has ``bound_exponent`` digits.

    Paper mode returns base**(bound_exponent**2) + 1 + offset, the least
    tail clearing the abnormality bound (offset picks later members of
    the countable family of valid tails). Relaxed mode shrinks the
    exponent to ceil(scale * bound_exponent); toy mode returns 2 +
    offset regardless.
    """
    if bound_exponent < 1:
        raise ValueError("bound exponent must be >= 1")
    if offset < 0:
        raise ValueError("offset must be >= 0")
    if mode.kind == MODE_TOY:
        return 2 + offset
    if mode.kind == MODE_PAPER:
        exponent = bound_exponent * bound_exponent
    else:
        scaled = mode.scale * bound_exponent
        exponent = -(-scaled.numerator // scaled.denominator)
    approx_bits = (exponent * log2_fixed(base, 1, 32)) >> 32
    if approx_bits > max_bits:
        raise ResourceBudgetExceeded(
            f"tail digit needs ~{approx_bits} bits which exceeds the "
            f"{max_bits}-bit budget; rerun in relaxed:<scale> or toy mode")
    if base == 2:
        return (1 << exponent) + 1 + offset
    return base**exponent + 1 + offset


@dataclass(frozen=True)
class BlockPlan:
    """The three computed insertions for one block, with their denominators."""

    ell1: int
    ell2: int
    ell3: int
    exponent: int
    q1: int
    q2: int
    q3: int
    candidates_tested: int


def plan_block(q_prev: int, q_cur: int, base: int,
               budget: SearchBudget = DEFAULT_BUDGET) -> BlockPlan:
    """Choose insertions making the third denominator an exact base power.

    Step 1: the least multiplier making q1 = ell1*q_cur + q_prev coprime
    to both the base and q_cur - 1. Step 2: the least prime q2 in the
    class q_cur mod q1 with the base as a primitive root (the class is
    prime-rich: q1's coprimality is exactly what the finiteness
    screening needs). Step 3: the discrete log of q1 mod q2, lifted
    until the power clears 2*q2; the recurrence then forces
    ell3 = (base**k - q1)/q2 exactly.
    """
    if math.gcd(q_prev, q_cur) != 1:
        raise ValueError("consecutive denominators must be coprime")
    if q_cur < 2:
        raise ValueError(f"q_cur must be >= 2, got {q_cur}")
    if base < 2 or nt.is_perfect_square(base):
        raise ValueError(f"base must be >= 2 and non-square, got {base}")

    ell1 = nt.coprimizing_multiplier(q_cur, q_prev, base * (q_cur - 1))
    q1 = ell1 * q_cur + q_prev
    assert math.gcd(q1, base) == 1 and math.gcd(q1, q_cur - 1) == 1

    assert nt.corollary_hypotheses(base, q1, q_cur)
    hit = nt.find_artin_prime(base, q1, q_cur % q1, budget.artin_limit,
                              effort=budget.factor_effort)
    ell2, q2 = hit.ell, hit.prime

    k0 = nt.discrete_log(base, q1 % q2, q2,
                         max_table_entries=budget.bsgs_entries)
    k = nt.lift_exponent(base, q2, k0, 2 * q2)
    q3 = base**k if base != 2 else 1 << k
    ell3, remainder = divmod(q3 - q1, q2)
    assert remainder == 0, "power hit must divide exactly; dlog is broken"
    assert ell3 >= 1
    assert q3 == ell3 * q2 + q1
    assert pure_power_exponent(q3, base) == k
    return BlockPlan(ell1=ell1, ell2=ell2, ell3=ell3, exponent=k,
                     q1=q1, q2=q2, q3=q3,
                     candidates_tested=hit.candidates_tested)


@dataclass(frozen=True)
class BlockCertificate:
    """Everything chosen for one block, checkable from the digit stream alone."""

    index: int
    base: int
    block_end: int            # stream index of the block's last seed digit
    inserted: tuple[int, int, int, int]
    denoms_before: tuple[int, int]   # q at block_end - 1 and block_end
    denoms_after: tuple[int, int, int]
    prime: int                # = denoms_after[1], the residue-class prime
    exponent: int             # denoms_after[2] = base ** exponent
    digit_bound: int          # cap on meaningful base digits of the convergent
    mode: str


class ConstructionAborted(RuntimeError):
    """A block could not be completed; partial results are attached."""

    def __init__(self, cause: Exception, failed_block: int,
                 digits: list[int], certificates: list[BlockCertificate],
                 insertion_positions: list[int]):
        super().__init__(
            f"block {failed_block} failed: {cause}")
        self.cause = cause
        self.failed_block = failed_block
        self.digits = digits
        self.certificates = certificates
        self.insertion_positions = insertion_positions


class ConstructedNumber:
    """A digit stream with insertions applied, plus its block certificates.

    Digits beyond the final planned block continue the raw seed stream;
    ``prefix`` extends the cached digits on demand. Removing the
    insertion positions from any prefix recovers the seed's own digits
    in order.
    """

    def __init__(self, config: ConstructionConfig, source,
                 digits: list[int], certificates: Sequence[BlockCertificate],
                 insertion_positions: Sequence[int]):
        self.config = config
        self.certificates = tuple(certificates)
        self.insertion_positions = tuple(insertion_positions)
        self._source = source
        self._digits = list(digits)

    @property
    def digits_through_blocks(self) -> list[int]:
        end = (block_boundary(self.config.block_size, self.config.blocks) + 4
               if self.config.blocks else 0)
        return self._digits[:end] if end else list(self._digits)

    def prefix(self, n: int) -> list[int]:
        while len(self._digits) < n:
            chunk = min(4096, n - len(self._digits))
            self._digits.extend(self._source.next_digits(chunk))
        return self._digits[:n]


def construct(config: ConstructionConfig, source) -> ConstructedNumber:
    """Run the full pipeline: B blocks of seed digits, four insertions each.

    Deterministic for a given config and seed source. On a failed block
    the work completed so far is preserved inside
    :class:`ConstructionAborted`.
    """
    digits: list[int] = []
    certificates: list[BlockCertificate] = []
    insertion_positions: list[int] = []
    p_prev, p_cur = 1, 0
    q_prev, q_cur = 0, 1

    def emit(d: int) -> None:
        nonlocal p_prev, p_cur, q_prev, q_cur
        digits.append(d)
        p_prev, p_cur = p_cur, d * p_cur + p_prev
        q_prev, q_cur = q_cur, d * q_cur + q_prev

    for i in range(1, config.blocks + 1):
        base = base_schedule(i)
        try:
            for d in seed_block(source, i, config.block_size):
                emit(d)
            boundary = block_boundary(config.block_size, i)
            assert len(digits) == boundary, (len(digits), boundary)
            plan = plan_block(q_prev, q_cur, base, config.budget)
            bound = digit_count_bound(plan.q3, base)
            tail = tail_digit(bound, base, config.mode,
                              offset=config.tail_offset,
                              max_bits=config.budget.tail_bits)
        except (SearchExhausted, ResourceBudgetExceeded, InputFormatError) as exc:
            raise ConstructionAborted(exc, i, digits, certificates,
                                      insertion_positions) from exc
        before = (q_prev, q_cur)
        for d in (plan.ell1, plan.ell2, plan.ell3, tail):
            insertion_positions.append(len(digits) + 1)
            emit(d)
        assert q_cur == tail * plan.q3 + plan.q2  # recurrence through the tail
        certificates.append(BlockCertificate(
            index=i, base=base, block_end=boundary,
            inserted=(plan.ell1, plan.ell2, plan.ell3, tail),
            denoms_before=before,
            denoms_after=(plan.q1, plan.q2, plan.q3),
            prime=plan.q2, exponent=plan.exponent, digit_bound=bound,
            mode=config.mode.label()))
    return ConstructedNumber(config, source, digits, certificates,
                             insertion_positions)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool | None       # None = not applicable at this scale/mode
    required: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    index: int
    checks: tuple[CheckResult, ...]
    tail_bound_met: bool

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks if c.required)

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if c.required and c.passed is False)


def _tail_exceeds(tail: int, base: int, exponent: int) -> bool:
    """Exact test tail > base**exponent."""
    if tail < 1:
        return False
    return not nt.pow_exceeds(base, exponent, tail - 1)


def verify_certificate(cert: BlockCertificate, digits: Sequence[int],
                       sample_window: int = 10_000) -> VerificationReport:
    """Recheck every certificate claim from the digit stream alone.

    Recomputes the convergents around the block, re-runs the
    number-theoretic conditions, and gathers the abnormality evidence:
    the parity of the convergent index, the exact gap bound from the
    tail digit, and agreement of the stream's base digits (pinched
    between cylinder endpoints) with the convergent's repeating-tail
    expansion. ``sample_window`` caps the digit comparison length.
    """
    checks: list[CheckResult] = []

    def add(name: str, passed: bool | None, detail: str = "",
            required: bool = True) -> None:
        checks.append(CheckResult(name, passed, required, detail))

    n_i = cert.block_end
    i = cert.index
    base = cert.base
    mode = Mode.parse(cert.mode)

    size_num = n_i - 4 * (i - 1)
    size_den = 1 << (i - 1)
    block_size = size_num // size_den if size_num % size_den == 0 else 0
    add("block_layout",
        block_size >= 2 and block_size % 2 == 0
        and block_boundary(block_size, i) == n_i,
        f"boundary {n_i} implies block size {block_size or '?'}")

    if len(digits) < n_i + 4:
        add("stream_length", False,
            f"need {n_i + 4} digits, stream has {len(digits)}")
        return VerificationReport(index=i, checks=tuple(checks),
                                  tail_bound_met=False)
    add("stream_length", True, f"{len(digits)} digits available")

    inserted = tuple(digits[n_i:n_i + 4])
    add("inserted_digits", inserted == cert.inserted,
        f"stream carries {_brief(inserted)}")

    walk = convergent_stream(digits[:n_i + 4])
    p_at = {}
    q_at = {}
    q_at[0] = 1
    p_at[0] = 0
    for conv in walk:
        if conv.index in (n_i - 1, n_i, n_i + 1, n_i + 2, n_i + 3, n_i + 4):
            p_at[conv.index] = conv.p
            q_at[conv.index] = conv.q
    qn_prev, qn = q_at[n_i - 1], q_at[n_i]
    q1, q2, q3, q4 = (q_at[n_i + 1], q_at[n_i + 2],
                      q_at[n_i + 3], q_at[n_i + 4])
    ell1, ell2, ell3, tail = cert.inserted

    add("denominators_before", (qn_prev, qn) == cert.denoms_before,
        f"stream gives ({_brief(qn_prev)}, {_brief(qn)})")
    add("denominators_after", (q1, q2, q3) == cert.denoms_after,
        "recomputed from the recurrence")
    add("recurrence",
        q1 == ell1 * qn + qn_prev and q2 == ell2 * q1 + qn
        and q3 == ell3 * q2 + q1,
        "q_{n+j} = insert_j * q_{n+j-1} + q_{n+j-2}")

    add("coprime_to_base", math.gcd(q1, base) == 1,
        f"gcd(q_next, {base})")
    add("coprime_to_predecessor", math.gcd(q1, qn - 1) == 1,
        "gcd(q_next, q_n - 1)")

    add("residue_class", q2 % q1 == qn % q1,
        "prime sits in the class q_n mod q_next")
    try:
        add("prime", nt.is_prime(q2) and q2 == cert.prime, _brief(q2))
        add("primitive_root", nt.is_primitive_root(base, q2),
            f"{base} generates mod {_brief(q2)}")
    except (ResourceBudgetExceeded, ValueError) as exc:
        add("primitive_root", False, f"could not certify: {exc}")

    k = cert.exponent
    add("power_hit", pure_power_exponent(q3, base) == k,
        f"third denominator is {base}**{k}")
    add("power_clears_modulus", nt.pow_exceeds(base, k, 2 * q2),
        f"{base}**{k} > 2 * prime")
    add("digit_bound", cert.digit_bound == k,
        "digit bound equals the power exponent")

    tail_met = _tail_exceeds(tail, base, k * k)
    add("tail_bound", tail_met,
        f"tail {'exceeds' if tail_met else 'does not exceed'} "
        f"{base}**{k * k}",
        required=(mode.kind == MODE_PAPER))

    # Abnormality evidence: the convergent after the third insertion.
    r = Fraction(p_at[n_i + 3], q3)
    endpoint_a = Fraction(p_at[n_i + 4], q4)
    endpoint_b = Fraction(p_at[n_i + 4] + p_at[n_i + 3], q4 + q3)
    lo, hi = min(endpoint_a, endpoint_b), max(endpoint_a, endpoint_b)

    add("sign_parity", (n_i + 3) % 2 == 1 and hi < r,
        "odd index, so the stream sits below its convergent")

    gap_cap = Fraction(1, tail * q3 * q3)
    add("gap_bound", r - lo <= gap_cap and r - hi <= gap_cap,
        "cylinder lies within 1/(tail * q**2) of the convergent")

    resolution_ok = _tail_exceeds(tail * q3 * q3, base, k * k)
    add("gap_resolution", resolution_ok,
        f"gap bound {'is' if resolution_ok else 'is not'} below "
        f"{base}**-{k * k}",
        required=(mode.kind == MODE_PAPER))

    window = sample_window
    tail_span = min(k * k, window)
    if tail_span > k:
        r_digits = base_expansion(r, base, tail_span,
                                  NON_TERMINATING).digits
        structure_ok = all(d == base - 1 for d in r_digits[k:])
        add("radix_tail_structure", structure_ok,
            f"digits {k + 1}..{tail_span} of the convergent all equal "
            f"{base - 1}")
    else:
        r_digits = base_expansion(r, base, max(k, 1),
                                  NON_TERMINATING).digits
        add("radix_tail_structure", None,
            "window too small to sample past the terminating digits",
            required=False)

    guaranteed = ilog_floor(tail * q3 * q3, base)
    span = min(window, guaranteed)
    lo_digits = base_expansion(lo, base, span).digits
    hi_digits = base_expansion(hi, base, span).digits
    agreed = 0
    for a, b in zip(lo_digits, hi_digits):
        if a != b:
            break
        agreed += 1
    y_digits = lo_digits[:agreed]
    r_window = base_expansion(r, base, max(agreed, 1),
                              NON_TERMINATING).digits[:agreed]
    matched = 0
    for a, b in zip(y_digits, r_window):
        if a != b:
            break
        matched += 1
    add("radix_window_match", matched == agreed,
        f"stream digits match the convergent's repeating-tail expansion "
        f"through all {agreed} pinched places (window {span})")

    probe = min(k * k, window)
    if agreed >= probe:
        differing = sum(1 for d in y_digits[:probe] if d != base - 1)
        add("window_differing_bound", differing <= cert.digit_bound,
            f"{differing} of the first {probe} digits differ from "
            f"{base - 1} (bound {cert.digit_bound})")
    else:
        add("window_differing_bound", None,
            f"only {agreed} digits pinned; the {probe}-digit window "
            "needs a larger tail", required=False)

    return VerificationReport(index=i, checks=tuple(checks),
                              tail_bound_met=tail_met)


def _brief(value) -> str:
    if isinstance(value, tuple):
        return "(" + ", ".join(_brief(v) for v in value) + ")"
    if isinstance(value, int) and value.bit_length() > 128:
        return f"<{value.bit_length()}-bit integer>"
    text = str(value)
    if len(text) > 40:
        return f"{text[:12]}...{text[-12:]}"
    return text


@dataclass(frozen=True)
class InsertionDensity:
    inserted: int
    prefix_len: int
    bound: int

    @property
    def within_bound(self) -> bool:
        return self.inserted <= self.bound


def insertion_density(positions: Sequence[int], prefix_len: int,
                      block_size: int) -> InsertionDensity:
    """Count insertions within a prefix and check the logarithmic bound.

    Blocks double in length, so a prefix of n digits spans at most
    log2(n/N) + 2 blocks of four insertions each; the explicit bound is
    4 * (floor(log2(max(n, N)/N)) + 2).
    """
    if prefix_len < 1:
        raise ValueError("prefix length must be positive")
    inserted = sum(1 for p in positions if p <= prefix_len)
    ratio = max(prefix_len, block_size) // block_size
    bound = 4 * ((ratio.bit_length() - 1) + 2)
    return InsertionDensity(inserted=inserted, prefix_len=prefix_len,
                            bound=bound)
