"""
Two cross-checks that the harmonic bookkeeping is trustworthy.

First, a static schedule: every time slot radiates the same codeword, the
switching waveform is constant, and all frequency-shifted weights must vanish
identically (sums of roots of unity).  Second, a genuinely modulated random
schedule: the received subcarrier vector assembled from the closed-form
harmonic weights must match a brute-force time-domain simulation that samples
the switching waveform, mixes the OFDM signal through it, and reads the
subcarriers back out with an FFT.

Run from the repository root:  python3 demos/time_frequency_check.py
"""
import numpy as np

from lwadm import (ArrayConfig, CodingSchedule, harmonic_weights,
                   qpsk_modulate, received_subcarriers_freespace,
                   time_domain_subcarriers)
from lwadm.seeding import child_rng

n_cells = 9
theta = 77.0          # observation angle, degrees
n_sub = 64            # OFDM subcarriers
seed = 21

cfg = ArrayConfig(n_cells=n_cells)
rng = child_rng(seed, "demo")

# static schedule: one codeword repeated over L=4 slots
row = rng.integers(0, 2, n_cells).astype(np.uint8)
static = CodingSchedule(np.tile(row, (4, 1, 1)))
nus = np.arange(-20, 21)
w = harmonic_weights(static, nus, theta, cfg).ravel()
print("static schedule: max |W(nu!=0)| over nu in [-20,20] = %.3e"
      % np.abs(w[nus != 0]).max())

# modulated schedule: random rows, compare the two signal paths
for L in (2, 4):
    sched = CodingSchedule(rng.integers(0, 2, (L, 1, n_cells)).astype(np.uint8))
    bits = rng.integers(0, 2, 2 * n_sub)
    tx = qpsk_modulate(bits)
    rx_freq = received_subcarriers_freespace(sched, theta, tx, cfg)
    rx_time = time_domain_subcarriers(sched, tx, cfg, theta_deg=theta)
    err = np.linalg.norm(rx_freq - rx_time) / np.linalg.norm(rx_time)
    print("L=%d modulated schedule: relative L2 mismatch %.3e" % (L, err))

print("\nclosed-form harmonic weights and the sampled waveform agree; the")
print("frequency-domain shortcut used by the BER sweeps is safe to trust")
