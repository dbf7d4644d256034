from fractions import Fraction

import pytest

from growthlab.schedule import (
    CONSTRAINTS,
    MissingTable,
    Omega,
    ScanCapExceeded,
    Schedule,
    ScheduleEntry,
    ScheduleInvalid,
    build_schedule,
    check_entry,
    condition_I_threshold,
    find_min_d,
    find_min_n,
    parse_omega,
    validate_schedule,
)

E = ScheduleEntry


def ledger(n1, d1=3, omega=None):
    return check_entry([], E(1, d1, n1), None, omega)


def test_catalog_is_complete_and_anchored():
    ids = [c.id for c in CONSTRAINTS]
    assert ids == [f"C{i}" for i in range(1, 16)]
    assert all(c.used_in for c in CONSTRAINTS)


def test_c3_threshold_between_10_and_11():
    assert ledger(11)["C3"].verdict == "pass"
    assert ledger(10)["C3"].verdict == "fail"


def test_c7_threshold_between_63_and_64():
    assert ledger(64)["C7"].verdict == "pass"
    assert ledger(63)["C7"].verdict == "fail"


def test_c12_trivial_at_8():
    assert ledger(8)["C12"].verdict == "pass"


def test_demo_n1_8_failures():
    rep = ledger(8)
    assert not rep.passed
    assert rep.failures == ["C3", "C4", "C7", "C8", "C10"]
    # alpha_1 = 4*64 + 24 = 280 for d_1 = 3
    assert int(rep["C3"].lhs, 16) == 256 + 280
    assert rep["C3"].rhs == "2^(25/3)"


def test_c5_not_applicable_at_k1():
    assert ledger(127)["C5"].verdict == "not-applicable"


def test_c4_threshold_value():
    assert condition_I_threshold(3, 1) == 570
    # monotone in the product: a finer ratio needs a bigger seed value
    assert condition_I_threshold(6, 1) > condition_I_threshold(3, 1)


def test_find_min_n_with_log_omega():
    om = parse_omega("log")
    assert om.last_at_least(Fraction(1, 6)) == 126
    assert find_min_n([], 1, 3, om) == 127


def test_find_min_n_without_omega_is_scan_minimal():
    n = find_min_n([], 1, 3)
    assert n == 64
    assert ledger(n).passed
    for smaller in range(1, n):
        assert not ledger(smaller).passed


def test_find_min_d_examples():
    assert find_min_d([], 1) == 3
    assert find_min_d([E(1, 3, 127)], 2) == 383
    assert find_min_d([E(1, 3, 8)], 2) == 26


def test_certified_schedule(certified_schedule):
    s = certified_schedule
    assert s.depth == 1 and s.certified
    e = s.entries[0]
    assert (e.k, e.d, e.n, e.m) == (1, 3, 127, 127)
    assert s.ledgers[0].passed


def test_revalidation_is_idempotent(certified_schedule):
    again = validate_schedule(certified_schedule)
    assert [v.to_dict() for v in again[0].verdicts] == \
        [v.to_dict() for v in certified_schedule.ledgers[0].verdicts]


def test_determinism(log_omega):
    a = build_schedule(1, d={1: 3}, omega=log_omega).to_dict()
    b = build_schedule(1, d={1: 3}, omega=log_omega).to_dict()
    assert a == b


def test_certified_mode_rejects_bad_overrides():
    with pytest.raises(ScheduleInvalid, match="C3"):
        build_schedule(1, "certified", d={1: 3}, n={1: 8})


def test_demo_mode_records_and_watermarks(demo_schedule):
    assert not demo_schedule.certified
    d = demo_schedule.to_dict()
    assert d["watermark"] == "uncertified"
    fails = [v["id"] for v in d["entries"][0]["ledger"] if v["verdict"] == "fail"]
    assert "C3" in fails


def test_depth_zero_is_empty():
    s = build_schedule(0)
    assert s.entries == [] and s.depth == 0 and s.certified


def test_json_round_trip(certified_schedule):
    d = certified_schedule.to_dict()
    back = Schedule.from_dict(d)
    assert back.entries == certified_schedule.entries
    assert back.to_dict() == d
    assert d["entries"][0]["ledger"][0]["lhs"].startswith("0x")


def test_missing_table_for_k2():
    with pytest.raises(MissingTable):
        check_entry([E(1, 3, 64)], E(2, 194, 40000), None)


def test_entry_must_follow_prefix():
    with pytest.raises(ValueError):
        check_entry([], E(2, 3, 8))


def test_scan_cap():
    with pytest.raises(ScanCapExceeded):
        find_min_n([], 1, 3, None, cap=20)
    # constant omega never falls below the bound, so C14 cannot be met
    with pytest.raises(ScanCapExceeded):
        find_min_n([], 1, 3, parse_omega("const:1/2"))


def test_log_omega_depth2_is_beyond_desk_scale(certified_schedule, log_omega):
    # C14 alone forces n_2 past 2^2299 at d_2 = 383
    with pytest.raises(ScanCapExceeded):
        find_min_n(certified_schedule.entries, 2, 383, log_omega)


def test_omega_presets(tmp_path):
    assert parse_omega(None) is None and parse_omega("none") is None
    log = parse_omega("log")
    assert log(1) == 1 and log(3) == Fraction(1, 2) and log(126) == Fraction(1, 6)
    c = parse_omega("const:1/7")
    assert c(10 ** 9) == Fraction(1, 7)
    f = tmp_path / "om.txt"
    f.write_text("# omega table\n1/2\n1/3\n1/4\n")
    t = parse_omega(f"file:{f}")
    assert t(2) == Fraction(1, 3) and t(99) == 0
    assert t.last_at_least(Fraction(1, 3)) == 2
    with pytest.raises(ValueError):
        parse_omega("bogus")
    with pytest.raises(ValueError):
        Omega("log")(0)


@pytest.mark.slow
def test_depth2_without_omega():
    s = build_schedule(2, d={1: 3})
    assert [(e.d, e.n) for e in s.entries] == [(3, 64), (194, 39072)]
    assert s.certified
    assert all(l.passed for l in validate_schedule(s))
    assert s.ledgers[1]["C5"].verdict == "pass"
