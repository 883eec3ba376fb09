"""Monte-Carlo experiment orchestration.

One trial is a fully deterministic function of (config, trial_id): payload
bits, channel draw, noise, antenna selection and user placement each pull
from their own derived random stream.  Sweeps cross-multiply the grid
keys, run trials (optionally across processes) and write one CSV row per
trial in a fixed order, so identical configs reproduce identical bytes.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import channel, metrics
from .config import ExperimentConfig, SWEEP_KEY_ORDER, config_digest, with_overrides
from .despread import VirtualChainSet, time_despread
from .dsp import Rng
from .equalize import (
    apply_combiner,
    estimate_channel,
    nullspace_weights,
    true_effective_channel,
    zf_weights,
)
from .frontend import (
    FrontendConfig,
    SwitchMatrix,
    capture_hybrid,
    capture_physical,
    capture_switched,
    hybrid_weights,
    noise_power_for,
)
from .grouping import GroupingError, inphase_select, random_switch_matrix
from .waveform import OfdmConfig, build_frame, recover_bits

# used subcarrier closest to DC (fft bin +1); the antenna selector and the
# hybrid steering weights see the channel at this single reference bin
REFERENCE_BIN = 1

CARRIER_HZ = 2.4e9

# derived random-stream purposes; one per independent randomness source
_P_PAYLOAD, _P_CHANNEL, _P_NOISE, _P_SELECT, _P_PLACE, _P_SYNC = range(1, 7)

_POWER_ARCH = {
    "switched": "switched",
    "dbf": "dbf",
    "hbf_full": "hbf",
    "hbf_partial": "hbf",
    "fdma": "fdma",
}


def _ofdm(cfg: ExperimentConfig) -> OfdmConfig:
    return OfdmConfig(user_bandwidth_hz=cfg.bandwidth_hz, lts_repeats=cfg.lts_repeats)


def _payload_bits(cfg: ExperimentConfig, ofdm: OfdmConfig, trial_rng: Rng) -> list:
    n = ofdm.payload_bits_for_symbols(cfg.payload_symbols)
    rng = trial_rng.derive(_P_PAYLOAD)
    return [rng.bits(n) for _ in range(cfg.users)]


def _draw_positions(cfg: ExperimentConfig, rng: Rng) -> list:
    """Uniform user drops with 1 m wall margin, 0.5 m user spacing and 1 m
    standoff from the array center; falls back to the bare margin draw when
    the spacing rejection cannot be met."""
    margin = 1.0
    ap = np.array([cfg.ap_x_m, cfg.ap_y_m])
    placed: list = []
    for _ in range(cfg.users):
        pos = None
        for _attempt in range(100):
            cand = np.array(
                [
                    rng.uniform(margin, cfg.room_x_m - margin),
                    rng.uniform(margin, cfg.room_y_m - margin),
                ]
            )
            clear = np.linalg.norm(cand - ap) >= 1.0 and all(
                np.linalg.norm(cand - p) >= 0.5 for p in placed
            )
            if clear:
                pos = cand
                break
        if pos is None:
            pos = np.array(
                [
                    rng.uniform(margin, cfg.room_x_m - margin),
                    rng.uniform(margin, cfg.room_y_m - margin),
                ]
            )
        placed.append(pos)
    return [tuple(p) for p in placed]


def _draw_channel(cfg: ExperimentConfig, trial_rng: Rng) -> channel.ChannelSet:
    spacing = cfg.bandwidth_hz / 64.0
    if cfg.scenario == "rayleigh":
        chan = channel.rayleigh(
            cfg.users, cfg.antennas, 64, trial_rng.derive(_P_CHANNEL), cfg.rayleigh_taps
        )
        chan = channel.ChannelSet(chan.gains, CARRIER_HZ, spacing)
    else:
        if cfg.user_positions is not None:
            positions = [tuple(p) for p in cfg.user_positions]
        else:
            positions = _draw_positions(cfg, trial_rng.derive(_P_PLACE))
        wavelength = channel.SPEED_OF_LIGHT / CARRIER_HZ
        scene = channel.RoomScene(
            room_x_m=cfg.room_x_m,
            room_y_m=cfg.room_y_m,
            ap_xy_m=(cfg.ap_x_m, cfg.ap_y_m),
            user_xy_m=positions,
            antenna_offsets_m=channel.ula_offsets(cfg.antennas, wavelength / 2.0),
            wall_gammas=(cfg.scene_gamma,) * 4,
        )
        chan = channel.ray_trace(
            scene,
            64,
            max_reflections=cfg.max_reflections,
            carrier_hz=CARRIER_HZ,
            subcarrier_spacing_hz=spacing,
        )
        # uplink power control: every user arrives at the configured SNR,
        # so path loss does not fold into the per-user noise reference
        gains = chan.gains.copy()
        level = np.sqrt(np.mean(np.abs(gains) ** 2, axis=(1, 2)))
        gains /= level[:, None, None]
        chan = channel.ChannelSet(gains, chan.carrier_hz, chan.subcarrier_spacing_hz)
    if cfg.sync_mode == "offset" and cfg.sync_max_offset_samples > 0:
        offs = trial_rng.derive(_P_SYNC).uniform(
            -cfg.sync_max_offset_samples, cfg.sync_max_offset_samples, cfg.users
        )
        chan = channel.with_user_delays(chan, offs)
    return chan


def _select_matrix(cfg: ExperimentConfig, h_ref: np.ndarray, trial_rng: Rng) -> SwitchMatrix:
    if cfg.select == "grouped":
        return inphase_select(h_ref, cfg.grouping).matrix
    if cfg.select == "random":
        return random_switch_matrix(cfg.antennas, cfg.users, trial_rng.derive(_P_SELECT))
    return SwitchMatrix(np.eye(cfg.antennas, cfg.users, dtype=np.int64))


def _combiner_weights(cfg: ExperimentConfig, est):
    tol = cfg.grouping.rank_tolerance
    if cfg.combiner == "nullspace":
        return nullspace_weights(est, tol)
    return zf_weights(est, tol)


def _assemble_row(cfg, trial_id, sinr_db, evm_pct, ber, goodput, cap, report):
    sinr_db = np.asarray(sinr_db, dtype=float)
    se = goodput / (cfg.users * cfg.bandwidth_hz)
    return {
        "trial_id": trial_id,
        "arch": cfg.arch,
        "M": cfg.antennas,
        "K": cfg.chains,
        "users": cfg.users,
        "snr_db": cfg.snr_db,
        "seed": cfg.seed,
        "sinr_db": [float(v) for v in sinr_db],
        "mean_sinr_db": float(np.mean(sinr_db)),
        "evm_pct": float(evm_pct),
        "ber": float(ber),
        "goodput_bps": float(goodput),
        "capacity_bps": float(cap),
        "se": float(se),
        "total_mw": float(report.total_mw),
        "bits_per_joule": float(metrics.bits_per_joule(goodput, report.total_mw)),
    }


def _power_report(cfg: ExperimentConfig) -> metrics.PowerReport:
    if cfg.arch == "fdma":
        return metrics.power("fdma", 1, 1, cfg.users * cfg.bandwidth_hz)
    return metrics.power(
        _POWER_ARCH[cfg.arch], cfg.antennas, cfg.chains, cfg.bandwidth_hz
    )


def _failed_row(cfg: ExperimentConfig, trial_id: int) -> dict:
    nan = float("nan")
    report = _power_report(cfg)
    return _assemble_row(
        cfg, trial_id, np.full(cfg.users, nan), nan, nan, 0.0, nan, report
    )


def _run_fdma_trial(cfg: ExperimentConfig, trial_id: int) -> dict:
    """Users in disjoint bands on one antenna: no spatial interference."""
    trial_rng = Rng(cfg.seed, trial_id)
    ofdm = _ofdm(cfg)
    bits = _payload_bits(cfg, ofdm, trial_rng)
    chan = _draw_channel(cfg, trial_rng)
    sinr_db = np.zeros(cfg.users)
    evms = np.zeros(cfg.users)
    recovered, sent = [], []
    airtime = None
    for u in range(cfg.users):
        frame = build_frame(ofdm, [bits[u]])
        airtime = frame.payload_airtime_s
        sub = channel.ChannelSet(
            chan.gains[u : u + 1, :1, :], chan.carrier_hz, chan.subcarrier_spacing_hz
        )
        rx = channel.apply(sub, frame.tx_streams, ofdm.cp_len)
        fcfg = FrontendConfig(
            insertion_loss_db=0.0, snr_db=cfg.snr_db, num_users=1
        )
        sigma2 = noise_power_for(fcfg, rx)
        streams = capture_physical(rx, 1, fcfg, trial_rng.derive(_P_NOISE).derive(u))
        chains = VirtualChainSet(streams, [0])
        est = estimate_channel(chains, frame)
        comb = _combiner_weights(cfg, est)
        grids = apply_combiner(chains, frame, comb)
        recovered.extend(recover_bits(frame, grids))
        sent.append(bits[u])
        truth = true_effective_channel(sub, np.ones((1, 1)))
        sinr_db[u] = metrics.sinr(comb, truth, noise_power=sigma2)[0]
        evms[u] = metrics.evm(grids, frame.tx_grids)
    goodput, ber = metrics.goodput_and_ber(recovered, sent, airtime)
    cap = metrics.capacity(sinr_db, cfg.bandwidth_hz)
    return _assemble_row(
        cfg, trial_id, sinr_db, np.mean(evms), ber, goodput, cap, _power_report(cfg)
    )


def run_trial(cfg: ExperimentConfig, trial_id: int) -> dict:
    """One deterministic end-to-end trial; returns the CSV row mapping."""
    if cfg.arch == "fdma":
        return _run_fdma_trial(cfg, trial_id)
    trial_rng = Rng(cfg.seed, trial_id)
    ofdm = _ofdm(cfg)
    bits = _payload_bits(cfg, ofdm, trial_rng)
    chan = _draw_channel(cfg, trial_rng)
    frame = build_frame(ofdm, bits)
    rx = channel.apply(chan, frame.tx_streams, ofdm.cp_len)
    h_ref = chan.gains[:, :, REFERENCE_BIN]
    rng_noise = trial_rng.derive(_P_NOISE)
    noise_cov = None

    if cfg.arch == "switched":
        try:
            s = _select_matrix(cfg, h_ref, trial_rng)
        except GroupingError:
            return _failed_row(cfg, trial_id)
        fcfg = FrontendConfig(
            insertion_loss_db=cfg.insertion_loss_db,
            snr_db=cfg.snr_db,
            quantizer_bits=cfg.quantizer_bits or None,
            num_users=cfg.users,
        )
        sigma2 = noise_power_for(fcfg, rx)
        capture = capture_switched(rx, s, fcfg, rng_noise)
        chains = time_despread(capture, cfg.chains)
        loss_amp = 10.0 ** (-cfg.insertion_loss_db / 20.0)
        truth = true_effective_channel(chan, s.entries, loss_amp)
        # chain k inherits the n-way split noise of its slot
        noise_cov = sigma2 * np.diag(s.entries.sum(axis=0).astype(np.float64))
    elif cfg.arch == "dbf":
        fcfg = FrontendConfig(insertion_loss_db=0.0, snr_db=cfg.snr_db, num_users=cfg.users)
        sigma2 = noise_power_for(fcfg, rx)
        streams = capture_physical(rx, cfg.chains, fcfg, rng_noise)
        chains = VirtualChainSet(streams, list(range(cfg.chains)))
        truth = true_effective_channel(chan, np.eye(cfg.antennas)[:, : cfg.chains])
    else:  # hbf_full | hbf_partial
        mode = "fully" if cfg.arch == "hbf_full" else "partially"
        weights = hybrid_weights(h_ref, cfg.chains, mode)
        fcfg = FrontendConfig(insertion_loss_db=0.0, snr_db=cfg.snr_db, num_users=cfg.users)
        sigma2 = noise_power_for(fcfg, rx)
        streams = capture_hybrid(rx, weights, mode, fcfg, rng_noise)
        chains = VirtualChainSet(streams, list(range(cfg.chains)))
        truth = true_effective_channel(chan, weights)
        noise_cov = sigma2 * (weights.T @ weights.conj())

    est = estimate_channel(chains, frame)
    comb = _combiner_weights(cfg, est)
    grids = apply_combiner(chains, frame, comb)
    recovered = recover_bits(frame, grids)

    sinr_db = metrics.sinr(comb, truth, noise_power=sigma2, noise_cov=noise_cov)
    evm_pct = metrics.evm(grids, frame.tx_grids)
    goodput, ber = metrics.goodput_and_ber(
        recovered, frame.payload_bits, frame.payload_airtime_s
    )
    cap = metrics.capacity(sinr_db, cfg.bandwidth_hz)
    return _assemble_row(
        cfg, trial_id, sinr_db, evm_pct, ber, goodput, cap, _power_report(cfg)
    )


def _trial_task(args) -> dict:
    cfg, trial_id = args
    return run_trial(cfg, trial_id)


_SWEEP_FIELD = {
    "sweep.arch": "arch",
    "sweep.antennas": "antennas",
    "sweep.chains": "chains",
    "sweep.users": "users",
    "sweep.snr_db": "snr_db",
    "sweep.select": "select",
}


def sweep_combos(cfg: ExperimentConfig, use_sweep: bool = True) -> list:
    """Resolved per-combo configs in deterministic grid order."""
    active = list(cfg.sweep) if use_sweep else []
    if not active:
        return [cfg]
    values_by_key = dict(active)
    keys = sorted(values_by_key, key=SWEEP_KEY_ORDER.index)
    grids = [values_by_key[k] for k in keys]
    combos = []
    for values in itertools.product(*grids):
        updates = {_SWEEP_FIELD[k]: v for k, v in zip(keys, values)}
        combos.append(with_overrides(cfg, **updates))
    return combos


def csv_header(num_users: int) -> list:
    head = ["trial_id", "arch", "M", "K", "users", "snr_db", "seed"]
    head += [f"sinr_db_u{u}" for u in range(num_users)]
    head += [
        "mean_sinr_db",
        "ber",
        "goodput_bps",
        "capacity_bps",
        "se",
        "total_mw",
        "bits_per_joule",
    ]
    return head


def _fmt(value) -> str:
    return format(float(value), ".10g")


def format_row(row: dict, num_users: int) -> str:
    cells = [
        str(row["trial_id"]),
        row["arch"],
        str(row["M"]),
        str(row["K"]),
        str(row["users"]),
        _fmt(row["snr_db"]),
        str(row["seed"]),
    ]
    sinr = row["sinr_db"]
    cells += [_fmt(sinr[u]) if u < len(sinr) else "" for u in range(num_users)]
    cells += [
        _fmt(row["mean_sinr_db"]),
        _fmt(row["ber"]),
        _fmt(row["goodput_bps"]),
        _fmt(row["capacity_bps"]),
        _fmt(row["se"]),
        _fmt(row["total_mw"]),
        _fmt(row["bits_per_joule"]),
    ]
    return ",".join(cells)


def run_sweep(
    cfg: ExperimentConfig,
    out_path: str,
    workers: int = 1,
    use_sweep: bool = True,
) -> int:
    """Run the grid, write the CSV and its manifest; returns the row count.

    Rows appear in (combo, trial_id) order no matter how many workers run;
    identical configs therefore reproduce byte-identical files.
    """
    combos = sweep_combos(cfg, use_sweep)
    tasks = [(combo, t) for combo in combos for t in range(combo.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(tasks) // (workers * 4))
            rows = list(pool.map(_trial_task, tasks, chunksize=chunk))
    else:
        rows = [_trial_task(task) for task in tasks]

    num_users = max(combo.users for combo in combos)
    lines = [",".join(csv_header(num_users))]
    lines += [format_row(row, num_users) for row in rows]
    text = "\n".join(lines) + "\n"

    directory = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(directory, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    _write_manifest(cfg, out_path, len(rows), len(combos))
    return len(rows)


def _write_manifest(cfg: ExperimentConfig, out_path: str, rows: int, combos: int) -> None:
    from . import __version__

    manifest = {
        "config_sha256": config_digest(cfg),
        "version": __version__,
        "rows": rows,
        "combos": combos,
    }
    with open(out_path + ".manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
