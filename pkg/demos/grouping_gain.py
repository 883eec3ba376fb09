"""Why the switch matrix is chosen by channel phase, not at random.

Four users stand across a 12 m x 5 m room served by an 8-antenna wall
array.  Every slot can gate any subset of antennas, so each virtual chain
is free to sum several antennas.  Summing antennas whose phases for one
user agree (within an acute cone) beams at that user before any digital
processing; summing random antennas just stirs the interference.  This
script prints the chosen matrix and the SINR gap against random and
one-antenna-per-chain switching.
"""

import numpy as np

from switchmux import runner
from switchmux.config import build_config, parse_config_text
from switchmux.grouping import inphase_select

TRIALS = 60

positions = ((2.0, 2.5), (4.5, 4.0), (7.5, 4.0), (10.0, 2.5))
pin = "".join(
    f"scene.user{i}_x_m = {x}\nscene.user{i}_y_m = {y}\n"
    for i, (x, y) in enumerate(positions)
)
base = (
    "users = 4\nantennas = 8\nsnr_db = 15\nscenario = raytrace\n"
    "payload_symbols = 2\nseed = 5\n" + pin
)

# Show the matrix the phase-cone selector picks for this room.
cfg = build_config(parse_config_text(base + "select = grouped\n"))
chan = runner._draw_channel(cfg, runner.Rng(cfg.seed, 0))
result = inphase_select(chan.gains[:, :, runner.REFERENCE_BIN], cfg.grouping)
print("selected switch matrix (rows antennas, cols virtual chains):")
print(result.matrix.entries)
print(f"control word: {result.matrix.to_control_word()}")
print(f"antennas per chain: {result.matrix.entries.sum(axis=0)}")

print(f"\nmedian mean-SINR over {TRIALS} noise draws, same room:")
for select in ("grouped", "random", "identity"):
    cfg = build_config(parse_config_text(base + f"select = {select}\n"))
    med = np.median([runner.run_trial(cfg, t)["mean_sinr_db"] for t in range(TRIALS)])
    print(f"  {select:<9} {med:>7.2f} dB")

print("\ngrouped switching wins because each chain's antennas add nearly")
print("coherently for its user, making the effective channel diagonal heavy")
