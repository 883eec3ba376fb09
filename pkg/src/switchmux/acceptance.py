"""End-to-end validation checks for the release gate.

Each check exercises one product requirement through the public pipeline
and returns a CheckResult with the measured numbers in ``detail``, so a
failure message states how far off the run landed.  run_all() executes
the full battery; run_all(quick=True) keeps only the sub-second checks.

The Monte-Carlo checks pin their seeds.  They are regression gates, not
statistical tests: a code change that shifts the measured medians past
the documented tolerances is a behavior change and should fail here.
"""

from __future__ import annotations

import filecmp
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import codes, metrics, runner
from .config import build_config, parse_config_text
from .despread import VirtualChainSet, freq_despread, time_despread
from .dsp import Rng, SampleStream
from .equalize import apply_combiner, estimate_channel, true_effective_channel, zf_weights
from .frontend import FrontendConfig, capture_switched
from .grouping import random_switch_matrix
from .waveform import OfdmConfig, build_frame, recover_bits
from . import channel


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _config(text: str):
    return build_config(parse_config_text(text))


def _median_mean_sinr(cfg, trials: int) -> float:
    vals = [runner.run_trial(cfg, t)["mean_sinr_db"] for t in range(trials)]
    return float(np.nanmedian(vals))


# --- 1: switching-code arithmetic ------------------------------------------

def check_code_math() -> CheckResult:
    """Orthogonality, completeness and the closed-form code spectrum."""
    tol = 1e-9
    worst = 0.0
    for K in (1, 2, 4, 8):
        family = codes.generate_codes(K)
        stack = np.array([c.bits for c in family])
        if not np.array_equal(stack @ stack.T, np.eye(K, dtype=np.int64)):
            return CheckResult("code_math", False, f"K={K} codes not orthonormal")
        if not np.array_equal(stack.sum(axis=0), np.ones(K, dtype=np.int64)):
            return CheckResult("code_math", False, f"K={K} codes not complete")
        N = 64
        for code in family:
            spec = codes.code_spectrum(code, N)
            expected = np.zeros(N, dtype=np.complex128)
            for m in range(K):
                expected[m * (N // K)] = (N / K) * np.exp(
                    -2j * np.pi * code.phase_index * m / K
                )
            worst = max(worst, float(np.max(np.abs(spec - expected))))
    if worst >= tol:
        return CheckResult("code_math", False, f"spectrum error {worst:.3e} >= {tol}")
    # spot anchor: K=4 code 1 phases at harmonics {0, B, 2B, 3B}
    spec = codes.code_spectrum(codes.generate_codes(4)[1], 64)
    got = np.degrees(np.angle(spec[[0, 16, 32, 48]])) % -360.0
    got[got == 0] = 0.0
    want = np.array([0.0, -90.0, -180.0, -270.0])
    err = float(np.max(np.abs((got - want + 180) % 360 - 180)))
    passed = err < 1e-6
    return CheckResult(
        "code_math",
        passed,
        f"max spectrum error {worst:.1e}, K=4 harmonic phases "
        f"{np.round(got, 6).tolist()} deg (anchor err {err:.1e})",
    )


# --- 2: despreading equivalence ---------------------------------------------

def check_despread_equivalence(draws: int = 100) -> CheckResult:
    """Slot slicing and harmonic-shift despreading agree on random input."""
    rng = Rng(1234, 0)
    worst = 0.0
    for K in (1, 2, 4, 8):
        for d in range(draws):
            y = SampleStream(rng.normal_complex(K * 96), K * 1e7)
            a = time_despread(y, K)
            b = freq_despread(y, K)
            for sa, sb in zip(a.chains, b.chains):
                worst = max(worst, float(np.max(np.abs(sa.samples - sb.samples))))
    return CheckResult(
        "despread_equivalence", worst < 1e-9, f"max |time - freq| = {worst:.3e}"
    )


# --- 3: virtual chains match physical chains --------------------------------

def check_virtual_equals_physical(trials_per_snr: int = 75) -> CheckResult:
    """Identity-switched capture+despread tracks per-antenna chains.

    The switch insertion-loss constant is zeroed so the comparison
    isolates the gate-combine-despread path itself.
    """
    base = (
        "users = 4\nantennas = 4\nscenario = rayleigh\npayload_symbols = 2\n"
        "seed = 11\nfrontend.insertion_loss_db = 0.0\n"
    )
    diffs = []
    for snr in (17, 18, 19, 20):
        sw = _config(base + f"snr_db = {snr}\narch = switched\nselect = identity\n")
        db = _config(base + f"snr_db = {snr}\narch = dbf\n")
        a = [runner.run_trial(sw, t)["mean_sinr_db"] for t in range(trials_per_snr)]
        b = [runner.run_trial(db, t)["mean_sinr_db"] for t in range(trials_per_snr)]
        diffs.append(float(np.median(a) - np.median(b)))
    worst = max(abs(d) for d in diffs)
    return CheckResult(
        "virtual_equals_physical",
        worst <= 0.5,
        f"median gap per SNR {[round(d, 3) for d in diffs]} dB (|worst| "
        f"{worst:.3f}, tol 0.5, {4 * trials_per_snr} trials per arm)",
    )


# --- 4: noiseless interference floor ----------------------------------------

def check_interference_floor() -> CheckResult:
    """Noiseless full-rank captures must null cross-user leakage exactly."""
    rng = Rng(77, 0)
    worst_dbc = -np.inf
    for users, ants in ((2, 4), (3, 6), (4, 8), (8, 8)):
        ofdm = OfdmConfig(user_bandwidth_hz=1e7)
        bits = [rng.bits(ofdm.payload_bits_for_symbols(2)) for _ in range(users)]
        frame = build_frame(ofdm, bits)
        chan = channel.rayleigh(users, ants, 64, rng.derive(1), 3)
        rx = channel.apply(chan, frame.tx_streams, ofdm.cp_len)
        s = random_switch_matrix(ants, users, rng.derive(2))
        fcfg = FrontendConfig(insertion_loss_db=0.0, snr_db=None, num_users=users)
        cap = capture_switched(rx, s, fcfg, rng.derive(3))
        chains = time_despread(cap, users)
        est = estimate_channel(chains, frame)
        comb = zf_weights(est)
        grids = apply_combiner(chains, frame, comb)
        recovered = recover_bits(frame, grids)
        if any(np.any(r != b) for r, b in zip(recovered, bits)):
            return CheckResult(
                "interference_floor", False, f"bit errors at users={users} M={ants}"
            )
        truth = true_effective_channel(chan, s.entries)
        for f in range(truth.heff.shape[2]):
            g = comb.weights[:, :, f] @ truth.heff[:, :, f]
            diag = np.abs(np.diag(g)) ** 2
            off = np.abs(g - np.diag(np.diag(g))) ** 2
            leak = off.max() / diag.min()
            worst_dbc = max(worst_dbc, 10 * np.log10(max(leak, 1e-300)))
    return CheckResult(
        "interference_floor",
        worst_dbc < -60.0,
        f"worst cross-user leakage {worst_dbc:.1f} dBc (tol -60), BER 0",
    )


# --- 5: grouped selection beats random switching ----------------------------

_FIXED_USERS = ((2.0, 2.5), (4.5, 4.0), (7.5, 4.0), (10.0, 2.5))


def check_grouped_vs_random(trials: int = 100) -> CheckResult:
    """Phase-aligned grouping vs random full-rank matrices, one fixed room."""
    pin = "".join(
        f"scene.user{i}_x_m = {x}\nscene.user{i}_y_m = {y}\n"
        for i, (x, y) in enumerate(_FIXED_USERS)
    )
    base = (
        "users = 4\nantennas = 8\nsnr_db = 15\nscenario = raytrace\n"
        "payload_symbols = 2\nseed = 5\n" + pin
    )
    grouped = _median_mean_sinr(_config(base + "select = grouped\n"), trials)
    random_s = _median_mean_sinr(_config(base + "select = random\n"), trials)
    gap = grouped - random_s
    return CheckResult(
        "grouped_vs_random",
        gap >= 3.0,
        f"grouped median {grouped:.2f} dB vs random {random_s:.2f} dB, "
        f"gap {gap:+.2f} dB (tol >= 3)",
    )


# --- 6: more antennas harden the same user load -----------------------------

def check_antenna_hardening(trials: int = 100) -> CheckResult:
    """Median SINR must rise with M; at M=8 all users should clear 10 dB.

    Grouping failures produce NaN rows and count against the all-users
    clause.  The measured percentage is always reported.
    """
    base = (
        "users = 4\nsnr_db = 15\nscenario = raytrace\npayload_symbols = 2\nseed = 2\n"
    )
    medians = {}
    all_above = 0
    for m in (4, 6, 8):
        cfg = _config(base + f"antennas = {m}\n")
        rows = [runner.run_trial(cfg, t) for t in range(trials)]
        medians[m] = float(np.nanmedian([r["mean_sinr_db"] for r in rows]))
        if m == 8:
            ok = sum(
                1
                for r in rows
                if np.all(np.isfinite(r["sinr_db"])) and min(r["sinr_db"]) > 10.0
            )
            all_above = 100.0 * ok / trials
    monotone = medians[4] < medians[6] < medians[8]
    passed = monotone and all_above >= 90.0
    return CheckResult(
        "antenna_hardening",
        passed,
        f"medians M4/M6/M8 = {medians[4]:.2f}/{medians[6]:.2f}/{medians[8]:.2f} dB "
        f"(monotone {monotone}), all-users>10dB at M=8: {all_above:.0f}% (tol >= 90%)",
    )


# --- 7: 64-antenna / 8-user architecture ordering ---------------------------

def check_large_array_ordering(trials: int = 50) -> CheckResult:
    """Partially-connected HBF < switched <= fully-connected HBF ~= DBF,
    with the switched array within 5 +/- 2 dB of the 64-chain DBF median."""
    base = (
        "users = 8\nantennas = 64\nsnr_db = 15\nscenario = raytrace\n"
        "payload_symbols = 2\nseed = 1\n"
    )
    med = {
        arch: _median_mean_sinr(_config(base + f"arch = {arch}\n"), trials)
        for arch in ("switched", "dbf", "hbf_full", "hbf_partial")
    }
    gap = med["dbf"] - med["switched"]
    ordering = (
        med["hbf_partial"] < med["switched"] <= med["hbf_full"]
        and abs(med["hbf_full"] - med["dbf"]) <= 2.0
    )
    passed = ordering and 3.0 <= gap <= 7.0
    return CheckResult(
        "large_array_ordering",
        passed,
        "medians dB: pHBF {hbf_partial:.2f} < switched {switched:.2f} <= "
        "fHBF {hbf_full:.2f} ~= DBF {dbf:.2f} (ordering {o}); DBF-switched gap "
        "{gap:.2f} dB (tol 5 +/- 2)".format(o=ordering, gap=gap, **med),
    )


# --- 8: receiver power arithmetic -------------------------------------------

def check_power_arithmetic() -> CheckResult:
    anchors = [
        (metrics.power("switched", 8, 4, 1e7).total_mw, 762.0),
        (metrics.power("dbf", 4, 4, 1e7).total_mw, 2032.0),
        (metrics.power("fdma", 1, 1, 4e7).total_mw, 754.0),
        (metrics.power("dbf", 8, 8, 1e7).total_mw, 4064.0),
    ]
    got = [round(a, 9) for a, _ in anchors]
    want = [w for _, w in anchors]
    if got != want:
        return CheckResult("power_arithmetic", False, f"totals {got} != {want} mW")
    # converter power is linear in rate and count
    one = metrics.adc_power(1e-11, 12, 1e7)
    linear = (
        metrics.adc_power(1e-11, 12, 4e7) == 4 * one
        and metrics.adc_power(1e-11, 12, 8e7) == 8 * one
    )
    return CheckResult(
        "power_arithmetic",
        linear,
        f"totals {want} mW exact, adc_power linear {linear}",
    )


# --- 9: frame rate and capacity anchors -------------------------------------

def check_rate_and_capacity() -> CheckResult:
    # nominal rate from the frame arithmetic: info bits added per extra
    # payload symbol over the symbol period, times four 10 MHz users
    ofdm = OfdmConfig(user_bandwidth_hz=1e7)
    per_symbol = ofdm.payload_bits_for_symbols(2) - ofdm.payload_bits_for_symbols(1)
    one = build_frame(ofdm, [np.zeros(ofdm.payload_bits_for_symbols(1), dtype=np.int64)])
    two = build_frame(ofdm, [np.zeros(ofdm.payload_bits_for_symbols(2), dtype=np.int64)])
    symbol_s = two.payload_airtime_s - one.payload_airtime_s
    nominal = 4 * per_symbol / symbol_s
    cfg = _config(
        "users = 4\nantennas = 4\narch = fdma\nsnr_db = 40\npayload_symbols = 4\nseed = 3\n"
    )
    row = runner.run_trial(cfg, 0)
    rate_ok = row["ber"] == 0.0 and abs(nominal - 48e6) < 1e-6
    cap = metrics.capacity(np.full(4, 15.0), 1e7)
    cap_ok = 195e6 <= cap <= 205e6
    return CheckResult(
        "rate_and_capacity",
        rate_ok and cap_ok,
        f"nominal aggregate rate {nominal / 1e6:.1f} Mbps (want 48, error-free "
        f"4-symbol goodput {row['goodput_bps'] / 1e6:.2f}), 4x10MHz capacity at "
        f"15 dB {cap / 1e6:.1f} Mbps (want 195..205)",
    )


# --- 10: tolerance to unsynchronized users ----------------------------------

def check_sync_insensitivity(trials: int = 50) -> CheckResult:
    base = (
        "users = 4\nantennas = 8\nsnr_db = 20\nscenario = rayleigh\n"
        "payload_symbols = 2\nseed = 9\n"
    )
    aligned = _median_mean_sinr(_config(base + "sync_mode = aligned\n"), trials)
    offset = _median_mean_sinr(_config(base + "sync_mode = offset\n"), trials)
    diff = abs(aligned - offset)
    return CheckResult(
        "sync_insensitivity",
        diff < 1.0,
        f"aligned median {aligned:.2f} dB vs fractional-offset {offset:.2f} dB, "
        f"|diff| {diff:.3f} dB (tol < 1)",
    )


# --- 11: byte-identical sweeps ----------------------------------------------

def check_sweep_determinism() -> CheckResult:
    text = (
        "users = 2\nantennas = 4\npayload_symbols = 2\ntrials = 2\nseed = 7\n"
        "sweep.snr_db = 10, 20\n"
    )
    cfg = _config(text)
    with tempfile.TemporaryDirectory() as tmp:
        a = Path(tmp) / "a.csv"
        b = Path(tmp) / "b.csv"
        runner.run_sweep(cfg, str(a))
        runner.run_sweep(cfg, str(b))
        same = filecmp.cmp(a, b, shallow=False)
        size = a.stat().st_size
    return CheckResult(
        "sweep_determinism", same, f"two runs byte-identical: {same} ({size} bytes)"
    )


_QUICK = (
    check_code_math,
    check_despread_equivalence,
    check_interference_floor,
    check_power_arithmetic,
    check_rate_and_capacity,
    check_sweep_determinism,
)

_FULL = (
    check_code_math,
    check_despread_equivalence,
    check_virtual_equals_physical,
    check_interference_floor,
    check_grouped_vs_random,
    check_antenna_hardening,
    check_large_array_ordering,
    check_power_arithmetic,
    check_rate_and_capacity,
    check_sync_insensitivity,
    check_sweep_determinism,
)


def run_all(quick: bool = False) -> list:
    """Run the battery in order; quick keeps only the sub-second checks."""
    return [check() for check in (_QUICK if quick else _FULL)]
