"""OFDM/QPSK link-level Monte-Carlo over the time-modulated antenna.

The subcarrier spacing equals the antenna's switching rate, so one OFDM symbol
spans exactly one switching period and the antenna acts as a fixed linear mix
across subcarriers: the symbol received on subcarrier x is

    y_x = sum_k s_k * W(x - k)

with W the harmonic weights of the schedule at the observer (an angle in free
space, or a channel vector).  The fast path computes this convolution
directly; a sampled time-domain simulation is kept as a test oracle.  Leakage
landing outside the K-subcarrier band is dropped, mirroring a receive filter.

The receiver applies single-tap genie equalization by the noiseless gain
W(0) before noise is added, so Eb/N0 always measures the post-equalization
operating point and the static schedule's error rate is angle-independent.
Where |W(0)| falls below 1e-12 the link is treated as an outage (error rate
one half) rather than dividing by a vanishing gain.

Noise, bit, and channel draws all come from named substreams of a master seed
(see ``lwadm.seeding``), making every reported number a pure function of
(inputs, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import erfc

from .array_model import (
    ArrayConfig,
    CodingSchedule,
    harmonic_weights_from_steps,
    step_values_1d,
    step_values_2d,
    step_values_channel,
)
from .seeding import child_rng

GAIN_FLOOR = 1e-12
BITS_PER_SYMBOL = 2  # QPSK throughout

CHANNEL_KINDS = ("line-of-sight-angle", "rayleigh-iid", "doubly-correlated")

__all__ = [
    "BITS_PER_SYMBOL",
    "CHANNEL_KINDS",
    "OFDMConfig",
    "ChannelRealization",
    "LinkResult",
    "qpsk_modulate",
    "qpsk_demodulate",
    "qpsk_theory_ber",
    "awgn",
    "subcarrier_weight_table",
    "received_subcarriers_freespace",
    "received_subcarriers_channel",
    "time_domain_subcarriers",
    "generate_channel",
    "exponential_correlation",
    "evm_squared",
    "post_equalization_sinr",
    "secrecy_capacity",
    "ber_sweep_angle",
    "ber_sweep_snr",
]


@dataclass(frozen=True)
class OFDMConfig:
    """Multicarrier signal layout and Monte-Carlo budget.

    ``subcarrier_width`` must equal the antenna's switching frequency: that
    alignment is what turns the time modulation into a clean per-harmonic
    subcarrier mix.  ``bits_per_frame`` must fill a whole number of OFDM
    symbols.  ``seed`` is the default master seed for sweeps that are not
    given one explicitly.
    """

    # default frame: 500k bits rounded down to a whole number of symbols
    n_subcarriers: int = 64
    subcarrier_width: float = 15.0e3
    carrier_freq: float = 1.95e9
    bits_per_frame: int = 499968
    n_frames: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_subcarriers < 1:
            raise ValueError("n_subcarriers must be >= 1")
        if self.subcarrier_width <= 0.0 or self.carrier_freq <= 0.0:
            raise ValueError("frequencies must be positive")
        if self.bits_per_frame < 1 or self.n_frames < 1:
            raise ValueError("bits_per_frame and n_frames must be >= 1")
        if self.bits_per_frame % (self.n_subcarriers * BITS_PER_SYMBOL):
            raise ValueError("bits_per_frame must fill whole OFDM symbols")

    @property
    def symbols_per_frame(self) -> int:
        return self.bits_per_frame // (self.n_subcarriers * BITS_PER_SYMBOL)

    @property
    def total_bits(self) -> int:
        return self.bits_per_frame * self.n_frames

    def check_array(self, config: ArrayConfig):
        if not np.isclose(self.subcarrier_width, config.mod_freq, rtol=1e-9):
            raise ValueError("subcarrier width must equal the switching frequency")


# ---------------------------------------------------------------------------
# QPSK and noise


def qpsk_modulate(bits) -> np.ndarray:
    """Gray-mapped unit-energy QPSK; bit pair (b0, b1) -> ((1-2b0)+j(1-2b1))/sqrt2."""
    b = np.asarray(bits)
    if b.size % 2:
        raise ValueError("QPSK needs an even number of bits")
    pairs = b.reshape(-1, 2).astype(float)
    return ((1.0 - 2.0 * pairs[:, 0]) + 1j * (1.0 - 2.0 * pairs[:, 1])) / np.sqrt(2.0)


def qpsk_demodulate(symbols) -> np.ndarray:
    """Minimum-distance decisions; inverse of qpsk_modulate without noise."""
    s = np.asarray(symbols).reshape(-1)
    bits = np.empty((s.size, 2), dtype=np.uint8)
    bits[:, 0] = s.real < 0.0
    bits[:, 1] = s.imag < 0.0
    return bits.reshape(-1)


def qpsk_theory_ber(eb_n0_db) -> np.ndarray:
    """Exact QPSK bit error rate over AWGN: Q(sqrt(2 Eb/N0))."""
    ebn0 = 10.0 ** (np.asarray(eb_n0_db, dtype=float) / 10.0)
    return 0.5 * erfc(np.sqrt(ebn0))


def awgn(symbols, eb_n0_db, rng, bits_per_symbol: int = BITS_PER_SYMBOL) -> np.ndarray:
    """Add complex Gaussian noise for the given per-bit SNR.

    For unit-energy symbols the per-dimension variance is
    1/(2*bits_per_symbol*10^(EbN0/10)).  ``eb_n0_db`` of None or +inf
    bypasses the noise entirely (no draws are consumed).
    """
    s = np.asarray(symbols, dtype=complex)
    if eb_n0_db is None or np.isinf(eb_n0_db):
        return s.copy()
    sigma = np.sqrt(1.0 / (2.0 * bits_per_symbol * 10.0 ** (eb_n0_db / 10.0)))
    noise = rng.standard_normal(s.shape) + 1j * rng.standard_normal(s.shape)
    return s + sigma * noise


# ---------------------------------------------------------------------------
# frequency-domain fast path


def _step_values(schedule, config, theta_deg=None, phi_deg=None, shifter=None, csi=None):
    if csi is not None:
        return step_values_channel(schedule, csi, config)
    if phi_deg is None:
        return step_values_1d(schedule, float(theta_deg), config)[:, 0]
    return step_values_2d(schedule, float(theta_deg), float(phi_deg), config,
                          shifter=shifter)[:, 0]


def subcarrier_weight_table(step_values, n_subcarriers: int, span: int | None = None):
    """Harmonic weights W(nu) for every subcarrier offset.

    Returns (offsets, weights) with offsets -(K-1)..K-1; offsets beyond
    ``span`` (default 32 L) are zeroed, though with L >= 2 the span already
    covers every in-band offset.
    """
    vals = np.asarray(step_values, dtype=complex).reshape(-1)
    if span is None:
        span = 32 * vals.shape[0]
    offsets = np.arange(-(n_subcarriers - 1), n_subcarriers)
    w = harmonic_weights_from_steps(vals, offsets)
    w = np.where(np.abs(offsets) <= span, w, 0.0)
    return offsets, w


def _mix_matrix(step_values, n_subcarriers, span=None):
    offsets, w = subcarrier_weight_table(step_values, n_subcarriers, span)
    k = n_subcarriers - 1
    # T[x, j] = W(x - j)
    return toeplitz(w[k:], w[k::-1])


def received_subcarriers_freespace(schedule: CodingSchedule, theta_deg, tx_symbols,
                                   config: ArrayConfig, phi_deg=None, shifter=None,
                                   span: int | None = None) -> np.ndarray:
    """Noiseless per-subcarrier symbols observed from a free-space direction.

    y_x = sum_k s_k W(x-k, angle); rows of a 2D input are independent OFDM
    symbols.
    """
    s = np.asarray(tx_symbols, dtype=complex)
    k = s.shape[-1]
    steps = _step_values(schedule, config, theta_deg=theta_deg, phi_deg=phi_deg,
                         shifter=shifter)
    return s @ _mix_matrix(steps, k, span).T


def received_subcarriers_channel(schedule: CodingSchedule, chan, tx_symbols,
                                 config: ArrayConfig, span: int | None = None) -> np.ndarray:
    """Same mix with a flat-fading channel vector in place of the angle."""
    gains = chan.gains if isinstance(chan, ChannelRealization) else np.asarray(chan)
    if gains.shape != (config.n_cells,):
        raise ValueError("channel gain vector length must equal n_cells")
    s = np.asarray(tx_symbols, dtype=complex)
    steps = _step_values(schedule, config, csi=gains)
    return s @ _mix_matrix(steps, s.shape[-1], span).T


def time_domain_subcarriers(schedule: CodingSchedule, tx_symbols, config: ArrayConfig,
                            theta_deg=None, phi_deg=None, shifter=None, csi=None,
                            oversample: int = 8) -> np.ndarray:
    """Oracle path: sample the radiated waveform and correlate per subcarrier.

    One OFDM symbol occupies one switching period.  The waveform (OFDM signal
    times the active step's complex pattern value) is sampled at
    ``oversample * K`` Gauss-Legendre nodes per schedule step and the
    demodulation integral (1/T) int r(t) exp(-j 2 pi x f t) dt is evaluated
    segment by segment; the integrand is analytic inside each step, so the
    quadrature resolves it essentially to machine precision while a uniform
    grid would be first-order-limited by the switching discontinuities.
    Slow; used to validate the frequency-domain fast path.
    """
    s = np.atleast_2d(np.asarray(tx_symbols, dtype=complex))
    n_sym, k = s.shape
    steps = np.asarray(
        _step_values(schedule, config, theta_deg=theta_deg, phi_deg=phi_deg,
                     shifter=shifter, csi=csi)
    )
    l_steps = steps.shape[0]
    nodes, weights = np.polynomial.legendre.leggauss(oversample * k)
    period = config.mod_period
    seg = period / l_steps
    # (L, m) sample times covering each step's subinterval
    t = (nodes[None, :] + 1.0) * (seg / 2.0) + np.arange(l_steps)[:, None] * seg
    freq = np.arange(k) * config.mod_freq
    e_mod = np.exp(2j * np.pi * freq[:, None, None] * t[None])  # (K, L, m)
    wave = np.einsum("nk,klm->nlm", s, e_mod)
    received = wave * steps[None, :, None]
    out = np.einsum("nlm,xlm->nx", received * (weights * seg / 2.0), np.conj(e_mod)) / period
    return out[0] if np.asarray(tx_symbols).ndim == 1 else out


# ---------------------------------------------------------------------------
# channels


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of per-cell complex gains toward a single receive antenna."""

    kind: str
    gains: np.ndarray
    seed: int | None = None
    theta_deg: float | None = None
    correlation: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}")
        object.__setattr__(self, "gains", np.asarray(self.gains, dtype=complex))
        if self.gains.ndim != 1:
            raise ValueError("gains must be a vector (one receive antenna)")


def exponential_correlation(n: int, rho: float) -> np.ndarray:
    """Transmit-side correlation rho^|i-j| (real, symmetric, PSD for |rho|<1)."""
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    idx = np.arange(n)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def _psd_root(psi: np.ndarray) -> np.ndarray:
    if np.array_equal(psi, np.eye(psi.shape[0])):
        return np.eye(psi.shape[0])
    w, v = np.linalg.eigh(psi)
    if w.min() < -1e-10 * max(w.max(), 1.0):
        raise ValueError("correlation matrix must be positive semidefinite")
    return (v * np.sqrt(np.maximum(w, 0.0))) @ v.T


def generate_channel(kind: str, n_cells: int, seed: int, config: ArrayConfig | None = None,
                     theta_deg: float | None = None, rho: float | None = None,
                     psi_t=None) -> ChannelRealization:
    """Draw one channel realization.

    line-of-sight-angle: deterministic steering gains toward ``theta_deg``
    (requires ``config``); with these gains the channel mix reduces exactly to
    the free-space pattern at that angle.  rayleigh-iid: unit-power complex
    Gaussians.  doubly-correlated: i.i.d. draw times the symmetric PSD root of
    the transmit correlation (``psi_t``, or exponential with ``rho``); the
    receive side is a single antenna, correlation 1.  An identity correlation
    reproduces the rayleigh-iid draw bit for bit.
    """
    if kind not in CHANNEL_KINDS:
        raise ValueError(f"unknown channel kind {kind!r}")
    if kind == "line-of-sight-angle":
        if config is None or theta_deg is None:
            raise ValueError("line-of-sight-angle needs config and theta_deg")
        n = np.arange(n_cells)
        phase = config.wavenumber * config.cell_period * n * np.cos(np.deg2rad(theta_deg))
        amp = np.exp(config.leakage * config.cell_period * n)
        return ChannelRealization(kind=kind, gains=amp * np.exp(1j * phase),
                                  seed=seed, theta_deg=float(theta_deg))
    rng = np.random.default_rng(seed)
    draw = (rng.standard_normal(n_cells) + 1j * rng.standard_normal(n_cells)) / np.sqrt(2.0)
    if kind == "rayleigh-iid":
        return ChannelRealization(kind=kind, gains=draw, seed=seed)
    if psi_t is None:
        if rho is None:
            raise ValueError("doubly-correlated needs rho or psi_t")
        psi_t = exponential_correlation(n_cells, rho)
    psi_t = np.asarray(psi_t, dtype=float)
    if psi_t.shape != (n_cells, n_cells):
        raise ValueError("psi_t must be (n_cells, n_cells)")
    gains = draw @ _psd_root(psi_t)
    return ChannelRealization(kind=kind, gains=gains, seed=seed, correlation=psi_t)


# ---------------------------------------------------------------------------
# analytic link quality


def _signal_and_interference(step_values):
    """(|W(0)|^2, total power of every other harmonic) for given step values."""
    vals = np.asarray(step_values, dtype=complex).reshape(-1)
    w0 = vals.mean()  # harmonic 0 weight
    total = float((np.abs(vals) ** 2).mean())  # Parseval: sum_nu |W(nu)|^2
    sig = float(np.abs(w0) ** 2)
    return sig, max(total - sig, 0.0)


def evm_squared(step_values) -> float:
    """Noiseless error-vector power ratio after genie equalization.

    Equals sum_{nu != 0} |W(nu)|^2 / |W(0)|^2 via the power identity
    sum_nu |W(nu)|^2 = mean_u |value_u|^2 (exact, all harmonics included).
    Infinite when the fundamental vanishes.
    """
    sig, interf = _signal_and_interference(step_values)
    if sig < GAIN_FLOOR ** 2:
        return np.inf
    return interf / sig


def post_equalization_sinr(step_values, eb_n0_db,
                           bits_per_symbol: int = BITS_PER_SYMBOL) -> float:
    """Symbol SINR after equalization: 1 / (EVM^2 + noise power per symbol)."""
    evm2 = evm_squared(step_values)
    if eb_n0_db is None or np.isinf(eb_n0_db):
        noise = 0.0
    else:
        noise = 1.0 / (bits_per_symbol * 10.0 ** (eb_n0_db / 10.0))
    denom = evm2 + noise
    if denom <= 0.0:
        return np.inf
    if not np.isfinite(evm2):
        return 0.0
    return 1.0 / denom


def secrecy_capacity(snr_r, snr_e) -> float:
    """log2(1+SNR_R) - log2(1+SNR_E) in bits/s/Hz, clamped at 0.

    ``snr_r``/``snr_e`` are linear-scale receive SNRs of the intended and
    eavesdropping links; negative values are rejected.
    """
    snr_r = float(snr_r)
    snr_e = float(snr_e)
    if snr_r < 0.0 or snr_e < 0.0:
        raise ValueError("SNRs must be nonnegative")
    return max(np.log2(1.0 + snr_r) - np.log2(1.0 + snr_e), 0.0)


# ---------------------------------------------------------------------------
# Monte-Carlo sweeps


@dataclass
class LinkResult:
    """Sweep outcome: one row per (series, axis point).

    ``axis_name`` is "angle_deg" or "ebn0_db"; each row is (series label,
    axis value, bit error rate, bits tested, bit errors, secrecy capacity).
    """

    axis_name: str
    rows: list
    metadata: dict = field(default_factory=dict)

    HEADER = ("series", "axis", "ber", "bits_tested", "bit_errors", "secrecy_capacity")

    def series(self, name: str):
        """(axis, ber, bits, errors, c_s) arrays of one series."""
        sel = [r for r in self.rows if r[0] == name]
        if not sel:
            raise KeyError(f"no series {name!r}")
        arr = np.asarray([r[1:] for r in sel], dtype=float)
        return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4]

    def series_names(self):
        seen = []
        for r in self.rows:
            if r[0] not in seen:
                seen.append(r[0])
        return seen

    def to_text(self) -> str:
        lines = [",".join(self.HEADER)]
        for series, axis, ber, bits, errors, cs in self.rows:
            lines.append(
                "%s,%.9g,%.9g,%d,%d,%.9g" % (series, axis, ber, bits, errors, cs)
            )
        return "\n".join(lines) + "\n"

    def save(self, path: str):
        with open(path, "w") as fh:
            fh.write(self.to_text())


def _simulate_point(mix, w0, ofdm: OFDMConfig, eb_n0_db, rng_bits, rng_noise):
    """(errors, bits) for one observer with mixing matrix ``mix``."""
    k = ofdm.n_subcarriers
    if abs(w0) < GAIN_FLOOR:
        # outage: the equalizer has no gain to invert; decisions are coin flips
        return ofdm.total_bits // 2, ofdm.total_bits
    errors = 0
    for _frame in range(ofdm.n_frames):
        bits = rng_bits.integers(0, 2, size=ofdm.bits_per_frame).astype(np.uint8)
        sym = qpsk_modulate(bits).reshape(-1, k)
        rx = sym @ mix.T
        eq = rx / w0
        noisy = awgn(eq, eb_n0_db, rng_noise)
        errors += int(np.count_nonzero(qpsk_demodulate(noisy) != bits))
    return errors, ofdm.total_bits


def _point_records(step_values, ofdm, eb_n0_db, seed, label_bits, label_noise):
    mix = _mix_matrix(step_values, ofdm.n_subcarriers)
    w0 = np.asarray(step_values, dtype=complex).mean()
    rng_bits = child_rng(seed, label_bits)
    rng_noise = child_rng(seed, label_noise)
    return _simulate_point(mix, w0, ofdm, eb_n0_db, rng_bits, rng_noise)


def ber_sweep_angle(schedule: CodingSchedule, theta_grid_deg, eb_n0_db,
                    ofdm: OFDMConfig, config: ArrayConfig, seed: int | None = None,
                    phi_deg=None, shifter=None, include_static: bool = True,
                    bob_theta_deg: float | None = None,
                    sweep_tag: str = "angle") -> LinkResult:
    """Monte-Carlo bit error rate across observation angles at fixed Eb/N0.

    Every angle i draws its bits and noise from substreams
    "bits/<tag>-<i>" and "noise/<tag>-<i>"; the static baseline (first
    schedule step held for the whole period) reuses the identical draws, so
    the two series are paired sample by sample.  The secrecy column reports
    the analytic capacity of an intended receiver at ``bob_theta_deg``
    (default: the angle where the schedule's fundamental peaks) against an
    eavesdropper at the row's angle.
    """
    ofdm.check_array(config)
    if seed is None:
        seed = ofdm.seed
    grid = np.atleast_1d(np.asarray(theta_grid_deg, dtype=float))
    static = CodingSchedule(np.repeat(schedule.states[:1], schedule.n_steps, axis=0))

    step_tab = {}
    for name, sched in (("dm", schedule), ("static", static)):
        step_tab[name] = [
            _step_values(sched, config, theta_deg=th, phi_deg=phi_deg, shifter=shifter)
            for th in grid
        ]
    if bob_theta_deg is None:
        peak = np.argmax([np.abs(np.mean(v)) for v in step_tab["dm"]])
        bob_theta_deg = float(grid[peak])
    bob_steps = _step_values(schedule, config, theta_deg=bob_theta_deg,
                             phi_deg=phi_deg, shifter=shifter)
    snr_bob = post_equalization_sinr(bob_steps, eb_n0_db)

    rows = []
    names = ("dm", "static") if include_static else ("dm",)
    for i, th in enumerate(grid):
        for name in names:
            vals = step_tab[name][i]
            errors, bits = _point_records(
                vals, ofdm, eb_n0_db, seed, f"bits/{sweep_tag}-{i}", f"noise/{sweep_tag}-{i}"
            )
            if name == "dm":
                cs = secrecy_capacity(snr_bob, post_equalization_sinr(vals, eb_n0_db))
            else:
                cs = 0.0
            rows.append((name, float(th), errors / bits, bits, errors, cs))
    return LinkResult(
        axis_name="angle_deg",
        rows=rows,
        metadata={
            "eb_n0_db": float(eb_n0_db) if eb_n0_db is not None else None,
            "seed": seed,
            "schedule_steps": schedule.n_steps,
            "bob_theta_deg": float(bob_theta_deg),
        },
    )


def ber_sweep_snr(schedule: CodingSchedule, csi_bob, csi_eve, eb_n0_grid_db,
                  ofdm: OFDMConfig, config: ArrayConfig, seed: int | None = None,
                  sweep_tag: str = "snr") -> LinkResult:
    """Bob and Eve bit error rates over an Eb/N0 grid in a fading channel.

    ``csi_eve`` may be one vector or a stack of realizations; Eve's reported
    error rate at each grid point is the average across realizations (each
    observing the same transmitted bits through its own channel and noise
    "noise/<tag>-<i>-eve-<r>").  The secrecy column pairs Bob's analytic SINR
    with each Eve realization's and averages the capacities.
    """
    ofdm.check_array(config)
    if seed is None:
        seed = ofdm.seed
    grid = np.atleast_1d(np.asarray(eb_n0_grid_db, dtype=float))
    eve = np.atleast_2d(np.asarray(csi_eve, dtype=complex))

    bob_steps = _step_values(schedule, config, csi=np.asarray(csi_bob, dtype=complex))
    eve_steps = [_step_values(schedule, config, csi=h) for h in eve]
    mix_bob = _mix_matrix(bob_steps, ofdm.n_subcarriers)
    mix_eve = [_mix_matrix(v, ofdm.n_subcarriers) for v in eve_steps]

    rows = []
    for i, ebn0 in enumerate(grid):
        rng_bits = child_rng(seed, f"bits/{sweep_tag}-{i}")
        errors, bits = _simulate_point(
            mix_bob, np.mean(bob_steps), ofdm, ebn0, rng_bits,
            child_rng(seed, f"noise/{sweep_tag}-{i}")
        )
        snr_bob = post_equalization_sinr(bob_steps, ebn0)
        cs = float(np.mean([
            secrecy_capacity(snr_bob, post_equalization_sinr(v, ebn0))
            for v in eve_steps
        ]))
        rows.append(("bob", float(ebn0), errors / bits, bits, errors, cs))

        tot_err = 0
        tot_bits = 0
        for r, mix in enumerate(mix_eve):
            rng_bits_e = child_rng(seed, f"bits/{sweep_tag}-{i}")  # same transmission
            err_e, bits_e = _simulate_point(
                mix, np.mean(eve_steps[r]), ofdm, ebn0, rng_bits_e,
                child_rng(seed, f"noise/{sweep_tag}-{i}-eve-{r}")
            )
            tot_err += err_e
            tot_bits += bits_e
        rows.append(("eve", float(ebn0), tot_err / tot_bits, tot_bits, tot_err, cs))
    return LinkResult(
        axis_name="ebn0_db",
        rows=rows,
        metadata={"seed": seed, "schedule_steps": schedule.n_steps,
                  "n_eve_realizations": int(eve.shape[0])},
    )
