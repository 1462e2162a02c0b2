"""
Harmonic radiation patterns of a time-modulated leaky-wave antenna.

A static binary codeword steers the fundamental beam somewhere between the
all-zeros and all-ones limits; switching the codeword per time slot spreads
power into frequency-shifted harmonic beams.  This script prints the static
beam-angle limits, then loads the optimized two-step schedule shipped in
scenarios/beam-pattern-88.json and tabulates where its fundamental and first
harmonics point and how strongly the harmonics are suppressed at the target.

Run from the repository root:  python3 demos/harmonic_patterns.py
"""
import json
import os

import numpy as np

from lwadm import ArrayConfig, CodingSchedule, array_factor_1d, pattern_sweep

out_dir = os.environ.get("DEMO_OUT", "demo_out")
theta = np.arange(0.0, 180.0 + 1e-9, 0.1)   # fine angle grid, degrees
nus = np.arange(-3, 4)                       # harmonics to tabulate
theta0 = 88.0                                # desired direction

cfg = ArrayConfig(n_cells=9)

# static limits: every cell in state 0 vs every cell in state 1
for name, bit in (("all-zero", 0), ("all-one", 1)):
    mags = np.abs(array_factor_1d(np.full(cfg.n_cells, bit, dtype=np.uint8), theta, cfg))
    print("static %s codeword: beam peak at %.2f deg" % (name, theta[np.argmax(mags)]))

# the shipped schedule was produced by `lwadm solve` on beam-solve-88.json
scen = json.load(open(os.path.join(os.path.dirname(__file__), "..",
                                   "scenarios", "beam-pattern-88.json")))
states = np.asarray(scen["schedule"]["states"], dtype=np.uint8)[:, None, :]
sched = CodingSchedule(states)

patterns = pattern_sweep(sched, nus, theta, cfg)
k0 = int(np.argmin(np.abs(theta - theta0)))
print("\noptimized 2-step schedule, target %.0f deg:" % theta0)
print("  nu  peak_deg  peak_db  at_target_db")
fund = next(p for p in patterns if p.nu == 0)
for p in patterns:
    k = int(np.argmax(p.magnitude))
    print("  %+d  %8.1f  %7.2f  %12.2f"
          % (p.nu, theta[k], p.magnitude_db[k], p.magnitude_db[k0]))

# harmonic suppression at the target angle: fundamental vs strongest harmonic
harm = max(p.magnitude_db[k0] for p in patterns if p.nu != 0)
print("\nstrongest harmonic at target sits %.1f dB below the fundamental"
      % (fund.magnitude_db[k0] - harm))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for p in patterns:
        if abs(p.nu) <= 1:
            ax.plot(theta, p.magnitude_db, label="nu=%+d" % p.nu)
    ax.axvline(theta0, color="k", ls=":", lw=1)
    ax.set_xlabel("theta (deg)")
    ax.set_ylabel("normalized magnitude (dB)")
    ax.set_ylim(-60, 5)
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "harmonic_patterns.png")
    fig.savefig(path, dpi=120)
    print("saved", path)
except ImportError:
    pass
