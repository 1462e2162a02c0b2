"""Radiation model of a binary time-modulated leaky-wave antenna.

An antenna of N radiating cells (optionally M parallel branches fed through
phase shifters) is switched through a periodic schedule of L binary codewords.
Each cell in state 0 contributes a per-cell phase ``phase0`` and in state 1
``phase1``; phases accumulate along the traveling-wave feed, so cell n radiates
the running product of the first n per-cell phasors.  Fast periodic switching
spreads the radiation over harmonics of the switching frequency; this module
computes the per-harmonic complex weights, radiation patterns, and the
time-domain waveform they summarize.

Angles at the public interfaces are degrees; internal math is radians.
Magnitudes below 1e-15 are clamped to -300 dB.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0

# magnitudes below this are reported as -300 dB exactly
DB_FLOOR = 1e-15

__all__ = [
    "SPEED_OF_LIGHT",
    "DB_FLOOR",
    "ArrayConfig",
    "CodingSchedule",
    "HarmonicPattern",
    "magnitude_db",
    "cumulative_phase",
    "array_factor_1d",
    "array_factor_2d",
    "channel_gain",
    "shifter_phase",
    "shifter_phases",
    "fourier_coefficient",
    "fourier_coefficients",
    "harmonic_weight",
    "harmonic_weights",
    "harmonic_weights_from_steps",
    "step_values_1d",
    "step_values_2d",
    "step_values_channel",
    "time_domain_pattern",
    "pattern_sweep",
]


@dataclass(frozen=True)
class ArrayConfig:
    """Geometry, feed phases and timing of the coded antenna.

    Parameters
    ----------
    n_cells : int
        Cells per branch (N).
    n_branches : int
        Parallel branches (M); 1 for the plain 1D antenna.
    cell_period : float
        Cell-to-cell spacing p in metres.
    branch_spacing : float or None
        Branch-to-branch spacing d in metres; None means half a wavelength.
    leakage : float
        Axial attenuation alpha in Np/m (0 disables the taper).
    phase0_deg, phase1_deg : float
        Per-cell phase contribution in states 0 / 1, degrees.
    carrier_freq : float
        Carrier f0 in Hz.
    mod_freq : float
        Switching frequency f_p in Hz; one period spans the L schedule steps.
    shifter_bits : int
        Phase-shifter resolution: settings are multiples of 2*pi/2**bits.
    """

    n_cells: int
    n_branches: int = 1
    cell_period: float = 0.015
    branch_spacing: float | None = None
    leakage: float = 0.0
    phase0_deg: float = -18.0
    phase1_deg: float = 15.0
    carrier_freq: float = 1.95e9
    mod_freq: float = 15.0e3
    shifter_bits: int = 8

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError("n_cells must be >= 1")
        if self.n_branches < 1:
            raise ValueError("n_branches must be >= 1")
        if self.cell_period <= 0.0:
            raise ValueError("cell_period must be positive")
        if self.branch_spacing is not None and self.branch_spacing <= 0.0:
            raise ValueError("branch_spacing must be positive")
        if self.leakage < 0.0:
            raise ValueError("leakage must be >= 0")
        if self.carrier_freq <= 0.0 or self.mod_freq <= 0.0:
            raise ValueError("carrier_freq and mod_freq must be positive")
        if self.shifter_bits < 1:
            raise ValueError("shifter_bits must be >= 1")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def wavenumber(self) -> float:
        """Free-space k0 = 2*pi*f0/c."""
        return 2.0 * np.pi * self.carrier_freq / SPEED_OF_LIGHT

    @property
    def spacing(self) -> float:
        """Branch spacing d; defaults to half a wavelength."""
        return self.branch_spacing if self.branch_spacing is not None else 0.5 * self.wavelength

    @property
    def mod_period(self) -> float:
        """Switching period T_p = 1/f_p."""
        return 1.0 / self.mod_freq

    @property
    def phase0(self) -> float:
        return np.deg2rad(self.phase0_deg)

    @property
    def phase1(self) -> float:
        return np.deg2rad(self.phase1_deg)


class CodingSchedule:
    """Binary switching schedule: L steps x M branches x N cells.

    ``states`` is stored as a (L, M, N) uint8 array of 0/1.  One switching
    period T_p is split into L equal slots; slot u applies codeword u.
    """

    def __init__(self, states):
        arr = np.asarray(states)
        if arr.ndim == 2:  # (L, N) convenience form for single-branch antennas
            arr = arr[:, None, :]
        if arr.ndim != 3:
            raise ValueError("states must have shape (L, N) or (L, M, N)")
        if arr.size == 0:
            raise ValueError("schedule must be non-empty")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("states must be 0 or 1")
        self.states = arr.astype(np.uint8)

    @property
    def n_steps(self) -> int:
        return self.states.shape[0]

    @property
    def n_branches(self) -> int:
        return self.states.shape[1]

    @property
    def n_cells(self) -> int:
        return self.states.shape[2]

    def rows(self) -> np.ndarray:
        """(L, N) view for single-branch schedules."""
        if self.n_branches != 1:
            raise ValueError("rows() requires a single-branch schedule")
        return self.states[:, 0, :]

    def is_static(self) -> bool:
        return bool((self.states == self.states[0]).all())

    def __eq__(self, other):
        return isinstance(other, CodingSchedule) and np.array_equal(self.states, other.states)

    def __repr__(self):
        return f"CodingSchedule(L={self.n_steps}, M={self.n_branches}, N={self.n_cells})"


@dataclass
class HarmonicPattern:
    """Magnitude pattern of one harmonic over an angle grid.

    ``magnitude_db`` is normalized to the fundamental's grid maximum.
    For 2D patterns the grids are flattened meshes of equal length.
    """

    nu: int
    theta_deg: np.ndarray
    magnitude: np.ndarray
    magnitude_db: np.ndarray
    phi_deg: np.ndarray | None = field(default=None)


def magnitude_db(mag, ref: float = 1.0) -> np.ndarray:
    """20*log10(|mag|/ref) with values below the 1e-15 floor clamped to -300 dB."""
    rel = np.abs(np.asarray(mag, dtype=float)) / ref
    return 20.0 * np.log10(np.maximum(rel, DB_FLOOR))


def _check_states(states: np.ndarray):
    if not np.isin(states, (0, 1)).all():
        raise ValueError("states must be 0 or 1")


def cumulative_phase(states, config: ArrayConfig) -> np.ndarray:
    """Running feed phasors along the cell axis.

    Cell n carries the product of the first n per-cell phasors, so its phase is
    the running sum of phase0/phase1 picked by the binary states.  Accepts any
    leading shape; the trailing axis is the cell axis.
    """
    arr = np.asarray(states)
    _check_states(arr)
    kappa = np.where(arr == 1, config.phase1, config.phase0)
    return np.exp(1j * np.cumsum(kappa, axis=-1))


def _taper(config: ArrayConfig) -> np.ndarray:
    # e^{-alpha (n-1) p}, n = 1..N
    return np.exp(-config.leakage * config.cell_period * np.arange(config.n_cells))


def _check_theta_1d(theta_deg: np.ndarray):
    if np.any(theta_deg < 0.0) or np.any(theta_deg > 180.0):
        raise ValueError("1D pattern angles must lie in [0, 180] degrees")


def _check_angles_2d(theta_deg: np.ndarray, phi_deg: np.ndarray):
    if np.any(theta_deg < 0.0) or np.any(theta_deg > 90.0):
        raise ValueError("2D pattern theta must lie in [0, 90] degrees")
    if np.any(phi_deg < 0.0) or np.any(phi_deg >= 360.0):
        raise ValueError("2D pattern phi must lie in [0, 360) degrees")


def array_factor_1d(states, theta_deg, config: ArrayConfig) -> np.ndarray:
    """Single-codeword array factor of the 1D antenna.

    Parameters
    ----------
    states : array_like
        Binary codeword(s), shape (N,) or (R, N).
    theta_deg : float or array_like
        Observation angle(s) in [0, 180] degrees (axis of the antenna at 0).

    Returns
    -------
    complex ndarray broadcast over rows and angles.
    """
    rows = np.atleast_2d(np.asarray(states))
    if rows.shape[-1] != config.n_cells:
        raise ValueError("codeword length must equal n_cells")
    theta = np.asarray(theta_deg, dtype=float)
    _check_theta_1d(theta)
    tgrid = np.atleast_1d(theta)

    gamma = cumulative_phase(rows, config) * _taper(config)
    n = np.arange(config.n_cells)
    steer = np.exp(
        1j * config.wavenumber * config.cell_period * np.cos(np.deg2rad(tgrid))[:, None] * n
    )
    out = gamma @ steer.T
    if np.asarray(states).ndim == 1:
        out = out[0]
    if theta.ndim == 0:
        out = out[..., 0] if out.ndim else complex(out)
    return out


def array_factor_2d(states, theta_deg, phi_deg, config: ArrayConfig, shifter=None) -> np.ndarray:
    """Single-codeword array factor of the M-branch antenna.

    ``states`` has shape (M, N).  ``shifter`` is the per-branch feed phasor
    (M,) applied ahead of each branch (defaults to 1).  ``theta_deg`` and
    ``phi_deg`` broadcast against each other; theta in [0, 90], phi in [0, 360).
    With M = 1 and shifter 1 this reduces to the 1D factor with
    sin(theta)*sin(phi) in place of cos(theta).
    """
    arr = np.asarray(states)
    if arr.ndim != 2 or arr.shape != (config.n_branches, config.n_cells):
        raise ValueError("states must have shape (n_branches, n_cells)")
    theta = np.asarray(theta_deg, dtype=float)
    phi = np.asarray(phi_deg, dtype=float)
    _check_angles_2d(theta, phi)
    th, ph = np.broadcast_arrays(np.deg2rad(theta), np.deg2rad(phi))
    scalar = th.ndim == 0
    th = np.atleast_1d(th).ravel()
    ph = np.atleast_1d(ph).ravel()

    lam = np.ones(config.n_branches, dtype=complex) if shifter is None else np.asarray(shifter)
    if lam.shape != (config.n_branches,):
        raise ValueError("shifter must have shape (n_branches,)")

    gamma = cumulative_phase(arr, config) * _taper(config)  # (M, N)
    n = np.arange(config.n_cells)
    m = np.arange(config.n_branches)
    cell_phase = config.wavenumber * config.cell_period * (np.sin(th) * np.sin(ph))
    branch_phase = config.wavenumber * config.spacing * (np.sin(th) * np.cos(ph))
    steer_n = np.exp(1j * cell_phase[:, None] * n)  # (T, N)
    steer_m = np.exp(1j * branch_phase[:, None] * m)  # (T, M)
    per_branch = gamma @ steer_n.T  # (M, T)
    out = np.einsum("m,tm,mt->t", lam, steer_m, per_branch)
    return complex(out[0]) if scalar else out


def channel_gain(states, csi, config: ArrayConfig) -> np.ndarray:
    """Array response through an N-entry channel vector instead of an angle.

    ``csi`` has shape (N,) (or (..., N)); the per-cell taper is applied as in
    the free-space factor.  Rows broadcast as in :func:`array_factor_1d`.
    """
    rows = np.atleast_2d(np.asarray(states))
    if rows.shape[-1] != config.n_cells:
        raise ValueError("codeword length must equal n_cells")
    h = np.asarray(csi, dtype=complex)
    if h.shape[-1] != config.n_cells:
        raise ValueError("csi length must equal n_cells")
    gamma = cumulative_phase(rows, config) * _taper(config)
    out = gamma @ np.swapaxes(np.atleast_2d(h), -1, -2)
    if np.asarray(states).ndim == 1:
        out = out[0]
    if h.ndim == 1:
        out = out[..., 0]
    return out


def _quantize_phase(gamma, bits: int):
    # nearest multiple of 2*pi/2**bits; exact half-step ties round toward zero
    step = 2.0 * np.pi / (1 << bits)
    x = np.asarray(gamma, dtype=float) / step
    q = np.sign(x) * np.ceil(np.abs(x) - 0.5)
    return q * step


def shifter_phase(m: int, theta0_deg: float, phi0_deg: float, config: ArrayConfig) -> complex:
    """Quantized feed phasor of branch m (1-based) steering toward (theta0, phi0).

    The ideal phase (m-1)*k0*d*sin(theta0)*cos(phi0) is rounded to the nearest
    multiple of 2*pi/2**shifter_bits (ties toward zero) and applied as
    exp(-j*phase).  Branch 1 always gets 1.
    """
    if not 1 <= m <= config.n_branches:
        raise ValueError("branch index out of range")
    ideal = (
        (m - 1)
        * config.wavenumber
        * config.spacing
        * np.sin(np.deg2rad(theta0_deg))
        * np.cos(np.deg2rad(phi0_deg))
    )
    return complex(np.exp(-1j * _quantize_phase(ideal, config.shifter_bits)))


def shifter_phases(theta0_deg, phi0_deg, config: ArrayConfig) -> np.ndarray:
    """(M,) quantized feed phasors for all branches; angles may broadcast to (..., M)."""
    m = np.arange(config.n_branches)
    ideal = (
        m
        * config.wavenumber
        * config.spacing
        * (np.sin(np.deg2rad(np.asarray(theta0_deg, dtype=float)))
           * np.cos(np.deg2rad(np.asarray(phi0_deg, dtype=float))))[..., None]
    )
    return np.exp(-1j * _quantize_phase(ideal, config.shifter_bits))


def _harmonic_sinc(nus, L: int):
    # unnormalized sinc(pi*nu/L) with sinc(0) = 1; the zeros at nonzero
    # multiples of L are made exact instead of inheriting sin(pi*k) rounding
    nus = np.asarray(nus, dtype=float)
    out = np.sinc(nus / L)
    out = np.where(np.mod(nus, L) == 0, 0.0, out)
    return np.where(nus == 0, 1.0, out)


def fourier_coefficients(schedule: CodingSchedule, nu, config: ArrayConfig) -> np.ndarray:
    """Fourier-series coefficients of every cell's switching waveform.

    Cell (m, n)'s waveform over one period is the staircase of its L feed
    phasors; its coefficient at harmonic nu is

        c_{nu,n} = sum_u Gamma_n(q_u)/L * sinc(pi*nu/L) * exp(-j*pi*nu*(2u-1)/L).

    Returns an (M, N) array for scalar nu, or (V, M, N) for a vector of nu.
    """
    L = schedule.n_steps
    gamma = cumulative_phase(schedule.states, config)  # (L, M, N)
    nu_arr = np.asarray(nu)
    nus = np.atleast_1d(nu_arr).astype(float)
    u = np.arange(1, L + 1)
    phase = np.exp(-1j * np.pi * np.outer(nus, 2 * u - 1) / L)  # (V, L)
    out = np.einsum("vu,umn->vmn", phase, gamma) * (_harmonic_sinc(nus, L) / L)[:, None, None]
    return out[0] if nu_arr.ndim == 0 else out


def fourier_coefficient(schedule: CodingSchedule, nu: int, config: ArrayConfig,
                        n: int, m: int = 1) -> complex:
    """Single-cell Fourier coefficient; ``n`` and ``m`` are 1-based."""
    if not 1 <= n <= schedule.n_cells:
        raise ValueError("cell index out of range")
    if not 1 <= m <= schedule.n_branches:
        raise ValueError("branch index out of range")
    return complex(fourier_coefficients(schedule, nu, config)[m - 1, n - 1])


def step_values_1d(schedule: CodingSchedule, theta_deg, config: ArrayConfig) -> np.ndarray:
    """(L, T) array factors of each schedule step at the given angles."""
    vals = array_factor_1d(schedule.rows(), theta_deg, config)
    if np.asarray(theta_deg).ndim == 0:
        return np.asarray(vals)[:, None]
    return np.atleast_2d(vals)


def step_values_2d(schedule: CodingSchedule, theta_deg, phi_deg, config: ArrayConfig,
                   shifter=None) -> np.ndarray:
    """(L, T) two-dimensional array factors of each step; ``shifter`` is (L, M)."""
    if shifter is None:
        shifter = np.ones((schedule.n_steps, schedule.n_branches), dtype=complex)
    shifter = np.asarray(shifter)
    if shifter.shape != (schedule.n_steps, schedule.n_branches):
        raise ValueError("shifter must have shape (L, M)")
    vals = [
        np.atleast_1d(array_factor_2d(st, theta_deg, phi_deg, config, shifter=lam))
        for st, lam in zip(schedule.states, shifter)
    ]
    return np.asarray(vals)


def step_values_channel(schedule: CodingSchedule, csi, config: ArrayConfig) -> np.ndarray:
    """(L,) channel gains of each step for a single-branch schedule."""
    return np.atleast_1d(channel_gain(schedule.rows(), csi, config))


def harmonic_weights_from_steps(step_values, nu) -> np.ndarray:
    """Harmonic weights from per-step complex values.

    Whatever produced the L per-step values (an angle, a pair of angles, or a
    channel vector), the weight of harmonic nu is

        W(nu) = (1/L) * sinc(pi*nu/L) * exp(j*pi*nu/L) * sum_u values_u * exp(-j*2*pi*nu*u/L).

    ``step_values`` is (L,) or (L, T); scalar nu gives (T,) (or scalar),
    a nu vector gives (V, T) (or (V,)).
    """
    vals = np.asarray(step_values, dtype=complex)
    flat = vals.ndim == 1
    vals2 = vals[:, None] if flat else vals
    L = vals2.shape[0]
    nu_arr = np.asarray(nu)
    nus = np.atleast_1d(nu_arr).astype(float)
    u = np.arange(1, L + 1)
    phase = np.exp(-2j * np.pi * np.outer(nus, u) / L)  # (V, L)
    factor = _harmonic_sinc(nus, L) * np.exp(1j * np.pi * nus / L) / L  # (V,)
    out = factor[:, None] * (phase @ vals2)  # (V, T)
    if flat:
        out = out[:, 0]
    return out[0] if nu_arr.ndim == 0 else out


def harmonic_weight(schedule: CodingSchedule, nu: int, theta_deg, config: ArrayConfig,
                    phi_deg=None, shifter=None) -> np.ndarray:
    """Time-stripped complex weight of harmonic nu at the given angle(s).

    The full time factor exp(j*2*pi*nu*f_p*t) lives only in the time-domain
    path; the weight returned here multiplies subcarrier x-nu of the input
    signal when the antenna is observed from the given direction.  If all
    schedule steps are identical, every nu != 0 weight vanishes; weights at
    nonzero multiples of L vanish for any schedule.
    """
    if phi_deg is None:
        steps = step_values_1d(schedule, theta_deg, config)
    else:
        steps = step_values_2d(schedule, theta_deg, phi_deg, config, shifter=shifter)
    out = harmonic_weights_from_steps(steps, nu)
    return out if np.asarray(theta_deg).ndim else out[..., 0]


def harmonic_weights(schedule: CodingSchedule, nus, theta_deg, config: ArrayConfig,
                     phi_deg=None, shifter=None) -> np.ndarray:
    """(V, T) weights over a vector of harmonics; shares the step evaluation."""
    if phi_deg is None:
        steps = step_values_1d(schedule, theta_deg, config)
    else:
        steps = step_values_2d(schedule, theta_deg, phi_deg, config, shifter=shifter)
    return harmonic_weights_from_steps(steps, np.asarray(nus))


def time_domain_pattern(schedule: CodingSchedule, t, theta_deg, config: ArrayConfig,
                        signal=None, phi_deg=None, shifter=None) -> np.ndarray:
    """Radiated waveform sample(s): S(t) times the active step's array factor.

    ``t`` is seconds (any shape); the active step is u = floor(mod(t, T_p)/T_p*L).
    ``signal`` gives S(t) samples aligned with ``t`` (default 1).  The angle is
    fixed (scalar theta, and phi for the 2D antenna).
    """
    tt = np.asarray(t, dtype=float)
    L = schedule.n_steps
    frac = np.mod(tt, config.mod_period) / config.mod_period
    idx = np.minimum((frac * L).astype(int), L - 1)
    if phi_deg is None:
        steps = step_values_1d(schedule, float(theta_deg), config)[:, 0]
    else:
        steps = step_values_2d(schedule, float(theta_deg), float(phi_deg), config,
                               shifter=shifter)[:, 0]
    out = steps[idx]
    if signal is not None:
        out = out * np.asarray(signal)
    return out


def pattern_sweep(schedule: CodingSchedule, nus, theta_grid_deg, config: ArrayConfig,
                  phi_grid_deg=None, shifter=None) -> list[HarmonicPattern]:
    """Harmonic magnitude patterns over an angle grid.

    1D: ``theta_grid_deg`` is the grid.  2D: the two grids are meshed and the
    patterns are returned on the flattened mesh.  dB values are normalized to
    the fundamental's maximum over the grid, so the nu = 0 pattern peaks at
    0 dB; the fundamental is always computed for the normalization even when 0
    is not in ``nus``.
    """
    nus = np.asarray(nus, dtype=int)
    if nus.ndim != 1 or nus.size == 0:
        raise ValueError("nus must be a non-empty 1D integer list")
    theta = np.asarray(theta_grid_deg, dtype=float)
    if theta.size == 0:
        raise ValueError("angle grid must be non-empty")
    if phi_grid_deg is None:
        th = theta
        ph = None
        steps = step_values_1d(schedule, th, config)
    else:
        phi = np.asarray(phi_grid_deg, dtype=float)
        if phi.size == 0:
            raise ValueError("angle grid must be non-empty")
        thm, phm = np.meshgrid(theta, phi, indexing="ij")
        th, ph = thm.ravel(), phm.ravel()
        steps = step_values_2d(schedule, th, ph, config, shifter=shifter)

    all_nus = nus if 0 in nus else np.concatenate([nus, [0]])
    weights = harmonic_weights_from_steps(steps, all_nus)  # (V, T)
    fundamental = np.abs(weights[list(all_nus).index(0)])
    ref = max(float(fundamental.max()), DB_FLOOR)

    patterns = []
    for k, nu in enumerate(nus):
        mag = np.abs(weights[k])
        patterns.append(
            HarmonicPattern(
                nu=int(nu),
                theta_deg=th.copy(),
                phi_deg=None if ph is None else ph.copy(),
                magnitude=mag,
                magnitude_db=magnitude_db(mag, ref=ref),
            )
        )
    return patterns
