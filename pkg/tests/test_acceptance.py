"""Release-gate battery: one test per end-to-end validation check.

Each test delegates to switchmux.acceptance and asserts the check's
verdict, so ``pytest -v`` prints one pass/fail line per requirement with
the measured numbers in the failure message.

Two checks encode targets the simulator does not currently meet under
its physically consistent noise model (the all-users-above-10dB
percentage in antenna_hardening and the large-array SINR gap in
large_array_ordering).  They are left failing on purpose, with the
measured values reported, instead of being skipped or loosened.
"""

from switchmux import acceptance


def _run(check):
    result = check()
    assert result.passed, f"{result.name}: {result.detail}"


def test_code_math():
    _run(acceptance.check_code_math)


def test_despread_equivalence():
    _run(acceptance.check_despread_equivalence)


def test_virtual_equals_physical():
    _run(acceptance.check_virtual_equals_physical)


def test_interference_floor():
    _run(acceptance.check_interference_floor)


def test_grouped_vs_random():
    _run(acceptance.check_grouped_vs_random)


def test_antenna_hardening():
    _run(acceptance.check_antenna_hardening)


def test_large_array_ordering():
    _run(acceptance.check_large_array_ordering)


def test_power_arithmetic():
    _run(acceptance.check_power_arithmetic)


def test_rate_and_capacity():
    _run(acceptance.check_rate_and_capacity)


def test_sync_insensitivity():
    _run(acceptance.check_sync_insensitivity)


def test_sweep_determinism():
    _run(acceptance.check_sweep_determinism)
