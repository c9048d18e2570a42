import dataclasses
from fractions import Fraction

import pytest

from abnormal_forge import (ConstructionAborted, ConstructionConfig, Mode,
                            ResourceBudgetExceeded, SearchBudget,
                            SearchExhausted, base_schedule, block_boundary,
                            construct, count_occurrences, digit_count_bound,
                            insertion_density, plan_block,
                            pure_power_exponent, seed_block, tail_digit,
                            verify_certificate)
from abnormal_forge.nt import is_perfect_square
from abnormal_forge.seed import ListDigitSource, RngDigitSource

from conftest import WORKED_SEED


def test_base_schedule_opening_sequence():
    assert [base_schedule(i) for i in range(1, 11)] == [2, 2, 3, 2, 3, 5, 2, 3, 5, 6]
    assert base_schedule(11) == 2
    assert base_schedule(15) == 7


def test_base_schedule_never_square_and_recurring():
    values = [base_schedule(i) for i in range(1, 300)]
    assert not any(is_perfect_square(b) for b in values)
    assert values.count(2) >= 20  # every base recurs


def test_block_boundary_examples():
    assert block_boundary(4, 1) == 4
    assert block_boundary(4, 2) == 12
    assert block_boundary(4, 3) == 24
    with pytest.raises(ValueError):
        block_boundary(5, 1)
    with pytest.raises(ValueError):
        block_boundary(4, 0)


def test_seed_block_lengths_and_positions():
    source = ListDigitSource(list(range(1, 17)))
    assert seed_block(source, 1, 4) == [1, 2, 3, 4]
    assert seed_block(source, 2, 4) == [5, 6, 7, 8]
    assert seed_block(source, 3, 4) == [9, 10, 11, 12, 13, 14, 15, 16]


def test_plan_block_worked_example():
    plan = plan_block(10, 13, 2)
    assert (plan.ell1, plan.q1) == (1, 23)
    assert (plan.ell2, plan.q2) == (2, 59)
    assert (plan.exponent, plan.ell3, plan.q3) == (15, 555, 32768)


def test_plan_block_base_three_example():
    plan = plan_block(1, 2, 3)
    assert (plan.ell1, plan.q1) == (2, 5)
    assert (plan.ell2, plan.q2) == (1, 7)
    assert (plan.exponent, plan.ell3, plan.q3) == (5, 34, 243)


def test_plan_block_rejects_square_base():
    with pytest.raises(ValueError):
        plan_block(10, 13, 4)
    with pytest.raises(ValueError):
        plan_block(10, 13, 9)


def test_plan_block_rejects_bad_denominators():
    with pytest.raises(ValueError):
        plan_block(4, 6, 2)   # not coprime
    with pytest.raises(ValueError):
        plan_block(0, 1, 2)   # q_cur < 2


def test_digit_count_bound_examples():
    assert digit_count_bound(32768, 2) == 15
    assert digit_count_bound(243, 3) == 5
    assert digit_count_bound(2, 2) == 1
    with pytest.raises(ValueError):
        digit_count_bound(32769, 2)
    with pytest.raises(ValueError):
        digit_count_bound(1, 2)


def test_pure_power_exponent():
    assert pure_power_exponent(1, 5) == 0
    assert pure_power_exponent(125, 5) == 3
    assert pure_power_exponent(126, 5) is None
    assert pure_power_exponent(2**2000, 2) == 2000
    assert pure_power_exponent(3**500, 3) == 500
    assert pure_power_exponent(3**500 + 1, 3) is None


def test_tail_digit_modes():
    paper = Mode.parse("paper")
    assert tail_digit(3, 2, paper) == 513
    assert tail_digit(15, 2, paper) == (1 << 225) + 1
    assert tail_digit(15, 2, Mode.parse("toy")) == 2
    assert tail_digit(15, 2, Mode.parse("toy"), offset=5) == 7
    assert tail_digit(3, 2, Mode.parse("relaxed:2")) == 65
    assert tail_digit(3, 2, Mode.parse("relaxed:1/2")) == 5
    assert tail_digit(3, 3, paper) == 3**9 + 1


def test_tail_digit_budget():
    with pytest.raises(ResourceBudgetExceeded) as info:
        tail_digit(10**6, 2, Mode.parse("paper"), max_bits=1 << 20)
    assert "relaxed" in str(info.value)


def test_mode_parsing():
    assert Mode.parse("paper").kind == "paper"
    assert Mode.parse("toy").label() == "toy"
    relaxed = Mode.parse("relaxed:1.5")
    assert relaxed.scale == Fraction(3, 2)
    assert relaxed.label() == "relaxed:3/2"
    with pytest.raises(ValueError):
        Mode.parse("strict")
    with pytest.raises(ValueError):
        Mode.parse("relaxed:0")


def test_config_validation():
    with pytest.raises(ValueError):
        ConstructionConfig(block_size=5, blocks=1, mode=Mode.parse("toy"))
    with pytest.raises(ValueError):
        ConstructionConfig(block_size=4, blocks=-1, mode=Mode.parse("toy"))
    with pytest.raises(ValueError):
        ConstructionConfig(block_size=4, blocks=1, mode=Mode.parse("toy"),
                           tail_offset=-2)


def test_worked_block_digits_and_certificate(worked_number):
    assert worked_number.digits_through_blocks == [
        1, 2, 3, 1, 1, 2, 555, (1 << 225) + 1]
    cert = worked_number.certificates[0]
    assert cert.block_end == 4
    assert cert.base == 2
    assert cert.denoms_before == (10, 13)
    assert cert.denoms_after == (23, 59, 32768)
    assert cert.prime == 59
    assert cert.exponent == 15
    assert cert.digit_bound == 15
    assert cert.inserted == (1, 2, 555, (1 << 225) + 1)
    assert worked_number.insertion_positions == (5, 6, 7, 8)


def test_construct_is_deterministic():
    config = ConstructionConfig(block_size=4, blocks=1, mode=Mode.parse("toy"))
    first = construct(config, RngDigitSource(3141))
    second = construct(config, RngDigitSource(3141))
    assert first.prefix(50) == second.prefix(50)
    assert first.certificates == second.certificates


def test_construct_zero_blocks_streams_seed():
    config = ConstructionConfig(block_size=4, blocks=0, mode=Mode.parse("toy"))
    result = construct(config, RngDigitSource(55))
    assert result.certificates == ()
    assert result.prefix(20) == RngDigitSource(55).next_digits(20)


def test_construct_requires_even_block():
    with pytest.raises(ValueError):
        ConstructionConfig(block_size=7, blocks=1, mode=Mode.parse("paper"))


def test_tail_offset_changes_exactly_one_digit():
    base_cfg = ConstructionConfig(block_size=4, blocks=1, mode=Mode.parse("toy"))
    offset_cfg = ConstructionConfig(block_size=4, blocks=1,
                                    mode=Mode.parse("toy"), tail_offset=1)
    a = construct(base_cfg, RngDigitSource(606)).prefix(30)
    b = construct(offset_cfg, RngDigitSource(606)).prefix(30)
    boundary = block_boundary(4, 1)
    tail_index = boundary + 4  # 1-based position of the tail digit
    assert a[tail_index - 1] + 1 == b[tail_index - 1]
    assert a[:tail_index - 1] == b[:tail_index - 1]
    assert a[tail_index:] == b[tail_index:]


def test_removing_insertions_recovers_seed():
    config = ConstructionConfig(block_size=4, blocks=1, mode=Mode.parse("toy"))
    result = construct(config, RngDigitSource(2020))
    n = 400
    stream = result.prefix(n)
    inserted = set(result.insertion_positions)
    stripped = [d for pos, d in enumerate(stream, start=1)
                if pos not in inserted]
    assert stripped == RngDigitSource(2020).next_digits(len(stripped))


def test_statistics_preservation_bound():
    config = ConstructionConfig(block_size=4, blocks=1, mode=Mode.parse("toy"))
    result = construct(config, RngDigitSource(11))
    n = 600
    stream = result.prefix(n)
    inserted = set(result.insertion_positions)
    stripped = [d for pos, d in enumerate(stream, start=1)
                if pos not in inserted]
    insertions = sum(1 for p in result.insertion_positions if p <= n)
    for pattern in ([1], [2], [1, 1], [2, 1, 1]):
        on_stream = count_occurrences(stream, pattern, n).count
        on_seed = count_occurrences(stripped, pattern, len(stripped)).count
        assert abs(on_stream - on_seed) <= (len(pattern) + 1) * insertions


def test_verify_worked_block(worked_number):
    report = verify_certificate(worked_number.certificates[0],
                                worked_number.digits_through_blocks)
    assert report.passed
    assert report.tail_bound_met
    names = [c.name for c in report.checks]
    assert "power_hit" in names and "gap_resolution" in names


def test_verify_detects_prime_tampering(worked_number):
    cert = worked_number.certificates[0]
    bad = dataclasses.replace(
        cert,
        inserted=(cert.inserted[0], cert.inserted[1] - 1,
                  cert.inserted[2], cert.inserted[3]))
    report = verify_certificate(bad, worked_number.digits_through_blocks)
    assert not report.passed
    failed = {c.name for c in report.failures}
    assert "inserted_digits" in failed


def test_verify_detects_stream_tampering(worked_number):
    cert = worked_number.certificates[0]
    digits = list(worked_number.digits_through_blocks)
    digits[5] = 1  # was 2: breaks the prime and the residue class
    report = verify_certificate(cert, digits)
    assert not report.passed
    failed = {c.name for c in report.failures}
    assert failed & {"prime", "residue_class", "denominators_after",
                     "inserted_digits"}


def test_verify_detects_power_tampering(worked_number):
    cert = worked_number.certificates[0]
    bad = dataclasses.replace(cert, exponent=14)
    report = verify_certificate(bad, worked_number.digits_through_blocks)
    assert not report.passed
    assert {"power_hit"} & {c.name for c in report.failures}


def test_relaxed_mode_round_trip():
    config = ConstructionConfig(block_size=4, blocks=1,
                                mode=Mode.parse("relaxed:2"))
    result = construct(config, ListDigitSource(WORKED_SEED))
    cert = result.certificates[0]
    assert cert.mode == "relaxed:2"
    assert cert.inserted[3] == (1 << 30) + 1  # base**(2 * 15) + 1
    report = verify_certificate(cert, result.digits_through_blocks)
    assert report.passed
    assert not report.tail_bound_met  # 2^30 + 1 is far below 2^225


def test_verify_toy_certificate_reports_tail_unmet():
    config = ConstructionConfig(block_size=4, blocks=1, mode=Mode.parse("toy"))
    result = construct(config, ListDigitSource(WORKED_SEED))
    report = verify_certificate(result.certificates[0],
                                result.digits_through_blocks)
    assert report.passed          # structural checks all hold
    assert not report.tail_bound_met
    tail_checks = {c.name: c for c in report.checks}
    assert tail_checks["tail_bound"].passed is False
    assert tail_checks["tail_bound"].required is False


def test_verify_requires_enough_digits(worked_number):
    report = verify_certificate(worked_number.certificates[0],
                                worked_number.digits_through_blocks[:6])
    assert not report.passed


def test_insertion_density_examples():
    positions = [5, 6, 7, 8, 13, 14, 15, 16]   # two completed blocks, N = 4
    d = insertion_density(positions, 8, 4)
    assert (d.inserted, d.bound, d.within_bound) == (4, 12, True)
    d = insertion_density(positions, 4, 4)
    assert d.inserted == 0
    d = insertion_density(positions, 16, 4)
    assert d.inserted == 8 and d.bound == 16 and d.within_bound


def test_insertion_density_from_constructed_number(worked_number):
    d = insertion_density(worked_number.insertion_positions, 8, 4)
    assert d.inserted == 4 and d.within_bound


def test_multi_block_aborts_with_partial_results():
    # Block 2 works modulo numbers whose size is exponential in block 1's
    # modulus; the searches must fail fast with the partial block intact.
    config = ConstructionConfig(
        block_size=4, blocks=2, mode=Mode.parse("toy"),
        budget=SearchBudget(artin_limit=500, bsgs_entries=1 << 20,
                            factor_effort=1 << 16, tail_bits=1 << 24))
    with pytest.raises(ConstructionAborted) as info:
        construct(config, RngDigitSource(42))
    aborted = info.value
    assert aborted.failed_block == 2
    assert len(aborted.certificates) == 1
    assert isinstance(aborted.cause, (ResourceBudgetExceeded, SearchExhausted))
    report = verify_certificate(aborted.certificates[0], aborted.digits)
    assert report.passed


def test_certificate_is_frozen(worked_number):
    with pytest.raises(dataclasses.FrozenInstanceError):
        worked_number.certificates[0].prime = 61
