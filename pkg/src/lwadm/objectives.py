"""Coding-sequence design objectives and their box relaxation.

Four problem kinds share one template: make every step look identical at the
intended receiver while maximizing per-step radiation (free-space kinds, via
small per-step angular slacks) or maximizing dissimilarity at an eavesdropper
(channel kinds).  All are minimizations over binary codewords, plus bounded
real slacks for the free-space kinds:

* ``freespace-1d``    sum_{u>=2} |X(th0, q_u) - X(th0, q_1)|
                      - sum_u |X(th0 + d_u, q_u)|,  L_u <= d_u <= U_u
* ``freespace-2d``    same with (theta, phi) pairs, per-step slack pairs, and
                      per-step quantized branch shifters set from the slacked
                      steering direction
* ``channel-perfect`` sum_{u>=2} |X(H_ab, q_u) - X(H_ab, q_1)|
                      - sum_{u>=2} |X(H_ae, q_u) - X(H_ae, q_1)|
* ``channel-partial`` the eavesdropper sum averaged over a frozen set of
                      eavesdropper channel realizations

The relaxation interpolates each cell's phase linearly between the two state
phases, kappa(q) = phase0 + q*(phase1 - phase0), q in [0, 1], which keeps every
feed phasor on the unit circle and is exact at the binary endpoints.  Absolute
values use the subgradient 0 at zero.  The objective is bounded below by
-L*N*M for any feasible point (each |X| is at most N*M).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array_model import (
    ArrayConfig,
    CodingSchedule,
    DB_FLOOR,
    array_factor_1d,
    array_factor_2d,
    harmonic_weights_from_steps,
    magnitude_db,
    shifter_phases,
    step_values_1d,
    step_values_2d,
    step_values_channel,
    _quantize_phase,
    _taper,
)

PROBLEM_KINDS = ("freespace-1d", "freespace-2d", "channel-perfect", "channel-partial")

__all__ = [
    "PROBLEM_KINDS",
    "DMProblem",
    "DecisionVector",
    "DMVerifyReport",
    "VerifyOptions",
    "objective_value",
    "relaxed_objective",
    "relaxed_objective_grad",
    "make_evaluator",
    "verify_dm_constraints",
]


@dataclass(frozen=True, eq=False)
class DMProblem:
    """One design instance: problem kind, antenna, target, and constraints.

    ``slack_bounds_deg`` is an (L, 2) array of per-step [lo, hi] windows in
    degrees (free-space kinds only; both slack axes of a 2D step share its
    window).  Channel kinds carry no slacks and need ``csi_bob`` (N,) plus
    ``csi_eve``: (N,) for perfect knowledge or (N_t, N) frozen realizations for
    statistical knowledge.
    """

    kind: str
    config: ArrayConfig
    n_steps: int
    theta0_deg: float | None = None
    phi0_deg: float | None = None
    slack_bounds_deg: np.ndarray | None = None
    csi_bob: np.ndarray | None = None
    csi_eve: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in PROBLEM_KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.n_steps < 2:
            raise ValueError("a modulation problem needs at least 2 steps")
        if self.kind == "freespace-2d":
            if self.config.n_branches < 1:
                raise ValueError("2D problems need n_branches >= 1")
        elif self.config.n_branches != 1:
            raise ValueError(f"{self.kind} requires a single-branch antenna")
        if self.kind.startswith("freespace"):
            if self.theta0_deg is None:
                raise ValueError("free-space problems need theta0_deg")
            if self.kind == "freespace-1d" and not 0.0 <= self.theta0_deg <= 180.0:
                raise ValueError("theta0_deg must lie in [0, 180]")
            if self.kind == "freespace-2d":
                if self.phi0_deg is None:
                    raise ValueError("freespace-2d needs phi0_deg")
                if not 0.0 <= self.theta0_deg <= 90.0:
                    raise ValueError("theta0_deg must lie in [0, 90]")
                if not 0.0 <= self.phi0_deg < 360.0:
                    raise ValueError("phi0_deg must lie in [0, 360)")
            bounds = self.slack_bounds_deg
            if bounds is None:
                bounds = np.tile([-10.0, 10.0], (self.n_steps, 1))
            bounds = np.asarray(bounds, dtype=float)
            if bounds.shape != (self.n_steps, 2):
                raise ValueError("slack_bounds_deg must have shape (n_steps, 2)")
            if np.any(bounds[:, 0] > bounds[:, 1]):
                raise ValueError("slack windows must satisfy lo <= hi")
            object.__setattr__(self, "slack_bounds_deg", bounds)
        else:
            if self.slack_bounds_deg is not None:
                raise ValueError("channel problems carry no slacks")
            if self.csi_bob is None or self.csi_eve is None:
                raise ValueError("channel problems need csi_bob and csi_eve")
            bob = np.asarray(self.csi_bob, dtype=complex)
            eve = np.asarray(self.csi_eve, dtype=complex)
            if bob.shape != (self.config.n_cells,):
                raise ValueError("csi_bob must have shape (n_cells,)")
            if self.kind == "channel-perfect":
                if eve.shape != (self.config.n_cells,):
                    raise ValueError("csi_eve must have shape (n_cells,)")
            else:
                if eve.ndim != 2 or eve.shape[1] != self.config.n_cells or eve.shape[0] < 1:
                    raise ValueError("csi_eve must have shape (n_realizations, n_cells)")
            object.__setattr__(self, "csi_bob", bob)
            object.__setattr__(self, "csi_eve", eve)

    @property
    def n_branches(self) -> int:
        return self.config.n_branches if self.kind == "freespace-2d" else 1

    @property
    def n_binaries(self) -> int:
        return self.n_steps * self.n_branches * self.config.n_cells

    @property
    def n_slack_axes(self) -> int:
        """Slack variables per step: 1 (1D), 2 (2D), 0 (channel)."""
        return {"freespace-1d": 1, "freespace-2d": 2}.get(self.kind, 0)


@dataclass
class DecisionVector:
    """Flat decision point: binaries in step-major (u, m, n) order plus slacks.

    ``binaries`` is (L*M*N,) float; ``slacks`` is (L, K) degrees with K the
    problem's slack axes (possibly 0).
    """

    binaries: np.ndarray
    slacks: np.ndarray

    def states(self, prob: DMProblem) -> np.ndarray:
        """(L, M, N) rounded binary states."""
        q = np.asarray(self.binaries, dtype=float)
        return np.rint(q).astype(np.uint8).reshape(
            prob.n_steps, prob.n_branches, prob.config.n_cells
        )

    def is_feasible(self, prob: DMProblem, tol: float = 1e-9) -> bool:
        q = np.asarray(self.binaries, dtype=float)
        if q.shape != (prob.n_binaries,):
            return False
        if np.any(np.abs(q - np.rint(q)) > tol) or np.any((q < -tol) | (q > 1 + tol)):
            return False
        d = np.asarray(self.slacks, dtype=float).reshape(prob.n_steps, -1)
        if d.shape[1] != prob.n_slack_axes:
            return False
        if prob.n_slack_axes:
            lo = prob.slack_bounds_deg[:, :1]
            hi = prob.slack_bounds_deg[:, 1:]
            if np.any(d < lo - tol) or np.any(d > hi + tol):
                return False
        return True


def _as_states(prob: DMProblem, states) -> np.ndarray:
    arr = states.states if isinstance(states, CodingSchedule) else np.asarray(states)
    if arr.ndim == 2:
        arr = arr[:, None, :]
    want = (prob.n_steps, prob.n_branches, prob.config.n_cells)
    if arr.shape != want:
        raise ValueError(f"states must have shape {want}")
    return arr


def _as_slacks(prob: DMProblem, slacks) -> np.ndarray:
    k = prob.n_slack_axes
    if slacks is None:
        return np.zeros((prob.n_steps, k))
    d = np.asarray(slacks, dtype=float).reshape(prob.n_steps, -1)
    if d.shape[1] != k:
        raise ValueError(f"slacks must have {k} axes per step")
    return d


def step_shifters(prob: DMProblem, slacks) -> np.ndarray:
    """(L, M) per-step quantized branch phasors from the slacked steering angles."""
    d = _as_slacks(prob, slacks)
    if prob.kind != "freespace-2d":
        return np.ones((prob.n_steps, 1), dtype=complex)
    return shifter_phases(prob.theta0_deg + d[:, 0], prob.phi0_deg + d[:, 1], prob.config)


def objective_value(prob: DMProblem, states, slacks=None) -> float:
    """Exact objective of a binary schedule (and slacks, where the kind has them).

    Built on the public pattern/channel evaluators, independently of the
    relaxation code path, so the two can cross-check each other.
    """
    arr = _as_states(prob, states)
    d = _as_slacks(prob, slacks)
    cfg = prob.config
    sched = CodingSchedule(arr)
    if prob.kind == "freespace-1d":
        xi0 = array_factor_1d(arr[:, 0, :], prob.theta0_deg, cfg)
        first = float(np.abs(xi0[1:] - xi0[0]).sum())
        second = sum(
            float(np.abs(array_factor_1d(arr[u, 0], prob.theta0_deg + d[u, 0], cfg)))
            for u in range(prob.n_steps)
        )
        return first - second
    if prob.kind == "freespace-2d":
        lam = step_shifters(prob, d)
        xi0 = step_values_2d(sched, prob.theta0_deg, prob.phi0_deg, cfg, shifter=lam)[:, 0]
        first = float(np.abs(xi0[1:] - xi0[0]).sum())
        second = sum(
            float(np.abs(array_factor_2d(
                arr[u], prob.theta0_deg + d[u, 0], prob.phi0_deg + d[u, 1], cfg,
                shifter=lam[u])))
            for u in range(prob.n_steps)
        )
        return first - second
    xi_b = step_values_channel(sched, prob.csi_bob, cfg)
    first = float(np.abs(xi_b[1:] - xi_b[0]).sum())
    eve = np.atleast_2d(prob.csi_eve)
    xi_e = np.asarray([step_values_channel(sched, h, cfg) for h in eve])  # (Nt, L)
    eveterm = float(np.abs(xi_e[:, 1:] - xi_e[:, :1]).sum(axis=1).mean())
    return first - eveterm


# ---------------------------------------------------------------------------
# batched relaxed evaluation with analytic gradients


def _revcumsum(x, axis=-1):
    return np.flip(np.cumsum(np.flip(x, axis=axis), axis=axis), axis=axis)


def _sign(z):
    a = np.abs(z)
    return np.where(a > 0.0, z / np.where(a > 0.0, a, 1.0), 0.0)


class _EvaluatorBase:
    """Batched objective/gradient over relaxed points.

    ``q`` arrives as (S, L, M, N) in [0, 1] and ``d`` as (S, L, K) degrees.
    Subclasses fill in the kind-specific math.  The flat layout used by the
    solver is [binaries (u-major, then branch, then cell), slacks (u-major,
    then axis)].
    """

    def __init__(self, prob: DMProblem):
        self.prob = prob
        cfg = prob.config
        self.L = prob.n_steps
        self.M = prob.n_branches
        self.N = cfg.n_cells
        self.K = prob.n_slack_axes
        self.n_binaries = prob.n_binaries
        self.n_dims = self.n_binaries + self.L * self.K
        self.delta = cfg.phase1 - cfg.phase0
        self.beta0 = cfg.phase0
        self.taper = _taper(cfg)
        self.narr = np.arange(self.N, dtype=float)

    def bounds(self):
        lo = np.zeros(self.n_dims)
        hi = np.ones(self.n_dims)
        if self.K:
            win = self.prob.slack_bounds_deg
            lo[self.n_binaries:] = np.repeat(win[:, 0], self.K)
            hi[self.n_binaries:] = np.repeat(win[:, 1], self.K)
        return lo, hi

    def unpack(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        q = x[:, : self.n_binaries].reshape(-1, self.L, self.M, self.N)
        # explicit batch size: reshape cannot infer -1 when K is 0
        d = x[:, self.n_binaries:].reshape(x.shape[0], self.L, self.K)
        return q, d

    def pack(self, q, d):
        q = np.asarray(q, dtype=float).reshape(-1, self.n_binaries)
        d = np.asarray(d, dtype=float).reshape(q.shape[0], -1)
        return np.concatenate([q, d], axis=1)

    def _gamma(self, q):
        kappa = self.beta0 + q * self.delta
        return np.exp(1j * np.cumsum(kappa, axis=-1))

    def value_flat(self, x):
        q, d = self.unpack(x)
        return self.value(q, d)

    def grad_flat(self, x):
        q, d = self.unpack(x)
        f, gq, gd = self.value_grad(q, d)
        g = np.concatenate(
            [gq.reshape(q.shape[0], -1), gd.reshape(q.shape[0], -1)], axis=1
        )
        return f, g


class _Evaluator1D(_EvaluatorBase):
    def __init__(self, prob):
        super().__init__(prob)
        cfg = prob.config
        self.k0p = cfg.wavenumber * cfg.cell_period
        self.theta0 = np.deg2rad(prob.theta0_deg)
        self.a0 = self.taper * np.exp(1j * self.k0p * self.narr * np.cos(self.theta0))

    def _parts(self, q, d):
        gamma = self._gamma(q)[:, :, 0, :]  # (S, L, N)
        t0 = gamma * self.a0
        xi0 = t0.sum(-1)  # (S, L)
        theta = self.theta0 + np.deg2rad(d[:, :, 0])  # (S, L)
        ad = self.taper * np.exp(1j * self.k0p * np.cos(theta)[..., None] * self.narr)
        td = gamma * ad
        xid = td.sum(-1)
        return t0, xi0, theta, td, xid

    def value(self, q, d):
        _, xi0, _, _, xid = self._parts(q, d)
        first = np.abs(xi0[:, 1:] - xi0[:, :1]).sum(axis=1)
        return first - np.abs(xid).sum(axis=1)

    def value_grad(self, q, d):
        t0, xi0, theta, td, xid = self._parts(q, d)
        diff = xi0[:, 1:] - xi0[:, :1]
        f = np.abs(diff).sum(axis=1) - np.abs(xid).sum(axis=1)

        s = _sign(diff)  # (S, L-1)
        r = _sign(xid)  # (S, L)
        g0 = 1j * self.delta * _revcumsum(t0)
        gd_dir = 1j * self.delta * _revcumsum(td)
        gq = np.zeros(q.shape[:2] + (self.N,))
        gq[:, 1:] = (np.conj(s)[..., None] * g0[:, 1:]).real
        gq[:, 0] = -(np.conj(s.sum(axis=1))[..., None] * g0[:, 0]).real
        gq -= (np.conj(r)[..., None] * gd_dir).real

        dxid_dth = -1j * self.k0p * np.sin(theta) * (td * self.narr).sum(-1)
        gd = -(np.conj(r) * dxid_dth).real * (np.pi / 180.0)
        return f, gq.reshape(q.shape), gd[..., None]


class _Evaluator2D(_EvaluatorBase):
    def __init__(self, prob):
        super().__init__(prob)
        cfg = prob.config
        self.k0 = cfg.wavenumber
        self.p = cfg.cell_period
        self.d_sp = cfg.spacing
        self.theta0 = np.deg2rad(prob.theta0_deg)
        self.phi0 = np.deg2rad(prob.phi0_deg)
        self.marr = np.arange(self.M, dtype=float)
        cell0 = self.k0 * self.p * np.sin(self.theta0) * np.sin(self.phi0)
        branch0 = self.k0 * self.d_sp * np.sin(self.theta0) * np.cos(self.phi0)
        self.b0 = self.taper * np.exp(1j * cell0 * self.narr)  # (N,)
        self.c0 = np.exp(1j * branch0 * self.marr)  # (M,)
        self.bits = cfg.shifter_bits

    def _shifter(self, theta, phi):
        # per-step quantized branch phasors; staircase in the slacks
        ideal = self.marr * self.k0 * self.d_sp * (np.sin(theta) * np.cos(phi))[..., None]
        return np.exp(-1j * _quantize_phase(ideal, self.bits))  # (S, L, M)

    def _parts(self, q, d):
        gamma = self._gamma(q)  # (S, L, M, N)
        theta = self.theta0 + np.deg2rad(d[:, :, 0])
        phi = self.phi0 + np.deg2rad(d[:, :, 1])
        lam = self._shifter(theta, phi)
        t0 = gamma * self.b0 * (lam * self.c0)[..., None]  # (S, L, M, N)
        xi0 = t0.sum((-1, -2))
        st, ct = np.sin(theta), np.cos(theta)
        sp, cp = np.sin(phi), np.cos(phi)
        cell = self.k0 * self.p * st * sp
        branch = self.k0 * self.d_sp * st * cp
        bd = self.taper * np.exp(1j * cell[..., None, None] * self.narr)
        cd = np.exp(1j * branch[..., None] * self.marr)
        td = gamma * bd * (lam * cd)[..., None]
        xid = td.sum((-1, -2))
        return t0, xi0, td, xid, (theta, phi, st, ct, sp, cp)

    def value(self, q, d):
        _, xi0, _, xid, _ = self._parts(q, d)
        first = np.abs(xi0[:, 1:] - xi0[:, :1]).sum(axis=1)
        return first - np.abs(xid).sum(axis=1)

    def value_grad(self, q, d):
        t0, xi0, td, xid, ang = self._parts(q, d)
        theta, phi, st, ct, sp, cp = ang
        diff = xi0[:, 1:] - xi0[:, :1]
        f = np.abs(diff).sum(axis=1) - np.abs(xid).sum(axis=1)

        s = _sign(diff)
        r = _sign(xid)
        g0 = 1j * self.delta * _revcumsum(t0)  # d xi0 / d q, (S, L, M, N)
        gdq = 1j * self.delta * _revcumsum(td)
        gq = np.zeros(q.shape)
        gq[:, 1:] = (np.conj(s)[..., None, None] * g0[:, 1:]).real
        gq[:, 0] = -(np.conj(s.sum(axis=1))[..., None, None] * g0[:, 0]).real
        gq -= (np.conj(r)[..., None, None] * gdq).real

        # slack gradients flow through the smooth steering factors only
        # (the quantized shifter is piecewise constant)
        wn = self.k0 * self.p * self.narr  # (N,)
        wm = self.k0 * self.d_sp * self.marr  # (M,)
        pn = (td * wn).sum((-1, -2))  # sum of n-weighted terms
        pm = (td * wm[:, None]).sum((-1, -2))
        dxi_dth = 1j * (pn * ct * sp + pm * ct * cp)
        dxi_dph = 1j * (pn * st * cp - pm * st * sp)
        gd = np.stack(
            [
                -(np.conj(r) * dxi_dth).real,
                -(np.conj(r) * dxi_dph).real,
            ],
            axis=-1,
        ) * (np.pi / 180.0)
        return f, gq, gd


class _EvaluatorChannel(_EvaluatorBase):
    def __init__(self, prob):
        super().__init__(prob)
        self.a_bob = (self.taper * prob.csi_bob)[None, :]  # (1, N)
        eve = np.atleast_2d(prob.csi_eve)
        self.a_eve = self.taper * eve  # (Nt, N)
        self.w_eve = 1.0 / self.a_eve.shape[0]

    def _diffs(self, gamma, a):
        # gamma (S, L, N), a (R, N) -> per-realization step gains and diffs
        xi = np.einsum("sln,rn->srl", gamma, a)
        return xi, xi[:, :, 1:] - xi[:, :, :1]

    def value(self, q, d):
        gamma = self._gamma(q)[:, :, 0, :]
        _, db = self._diffs(gamma, self.a_bob)
        _, de = self._diffs(gamma, self.a_eve)
        return np.abs(db).sum((1, 2)) - self.w_eve * np.abs(de).sum((1, 2))

    def _accumulate(self, gamma, a, weight, gq):
        xi, diff = self._diffs(gamma, a)
        s = _sign(diff)  # (S, R, L-1)
        t = np.einsum("sln,rn->srln", gamma, a)
        g = 1j * self.delta * _revcumsum(t)  # (S, R, L, N)
        gq[:, 1:] += weight * np.einsum("srl,srln->sln", np.conj(s), g[:, :, 1:]).real
        gq[:, 0] -= weight * np.einsum("sr,srn->sn", np.conj(s.sum(axis=2)), g[:, :, 0]).real
        return weight * np.abs(diff).sum((1, 2))

    def value_grad(self, q, d):
        gamma = self._gamma(q)[:, :, 0, :]
        gq = np.zeros(gamma.shape)
        f = self._accumulate(gamma, self.a_bob, 1.0, gq)
        f += self._accumulate(gamma, self.a_eve, -self.w_eve, gq)

        gd = np.zeros((q.shape[0], self.L, 0))
        return f, gq.reshape(q.shape), gd


def make_evaluator(prob: DMProblem) -> _EvaluatorBase:
    """Batched relaxed-objective evaluator for the given problem."""
    if prob.kind == "freespace-1d":
        return _Evaluator1D(prob)
    if prob.kind == "freespace-2d":
        return _Evaluator2D(prob)
    return _EvaluatorChannel(prob)


def _check_unit_box(q):
    if np.any(q < 0.0) or np.any(q > 1.0):
        raise ValueError("relaxed binaries must lie in [0, 1]")


def relaxed_objective(prob: DMProblem, q, slacks=None) -> float:
    """Objective at a relaxed point; exact at binary q."""
    ev = make_evaluator(prob)
    qq = np.asarray(q, dtype=float).reshape(1, prob.n_steps, prob.n_branches, -1)
    _check_unit_box(qq)
    dd = _as_slacks(prob, slacks)[None]
    return float(ev.value(qq, dd)[0])


def relaxed_objective_grad(prob: DMProblem, q, slacks=None):
    """(value, dq, dslacks) at a relaxed point; dq matches q's shape."""
    ev = make_evaluator(prob)
    qin = np.asarray(q, dtype=float)
    qq = qin.reshape(1, prob.n_steps, prob.n_branches, -1)
    _check_unit_box(qq)
    dd = _as_slacks(prob, slacks)[None]
    f, gq, gd = ev.value_grad(qq, dd)
    return float(f[0]), gq[0].reshape(qin.shape), gd[0]


# ---------------------------------------------------------------------------
# constraint verification


@dataclass(frozen=True)
class VerifyOptions:
    """Grids and thresholds for the design-goal report."""

    grid_step_deg: float = 0.1
    nu_max: int = 20
    undesired_offset_deg: float = 10.0

    def __post_init__(self):
        if self.grid_step_deg <= 0.0:
            raise ValueError("grid_step_deg must be positive")
        if self.nu_max < 1:
            raise ValueError("nu_max must be >= 1")
        if self.undesired_offset_deg <= 0.0:
            raise ValueError("undesired_offset_deg must be positive")


@dataclass
class DMVerifyReport:
    """How well a schedule meets the three modulation goals.

    * ``suppression_db``: strongest nonzero harmonic at the intended direction,
      dB relative to the fundamental there (static schedules report -300).
    * ``beam_deviation_deg``: per-step distance between the step's pattern peak
      and the intended direction (2D: max of the theta and wrapped phi offsets).
    * ``undesired_margin_db``: over all grid angles at least
      ``undesired_offset_deg`` away, the worst-case gap between the strongest
      nonzero harmonic and the *local* fundamental (>= -5 means some harmonic
      sits within 5 dB of the fundamental everywhere off target).
    """

    suppression_db: float
    beam_deviation_deg: np.ndarray
    undesired_margin_db: float
    options: VerifyOptions = field(default=VerifyOptions())

    @property
    def max_beam_deviation_deg(self) -> float:
        return float(np.max(self.beam_deviation_deg))

    def to_text(self) -> str:
        devs = " ".join(f"{v:.9g}" for v in np.atleast_1d(self.beam_deviation_deg))
        return (
            "dm verification report\n"
            f"suppression_db {self.suppression_db:.9g}\n"
            f"beam_deviation_deg {devs}\n"
            f"max_beam_deviation_deg {self.max_beam_deviation_deg:.9g}\n"
            f"undesired_margin_db {self.undesired_margin_db:.9g}\n"
            f"grid_step_deg {self.options.grid_step_deg:.9g}\n"
            f"nu_max {self.options.nu_max}\n"
            f"undesired_offset_deg {self.options.undesired_offset_deg:.9g}\n"
        )


def _wrapped_phi_offset(phi, phi0):
    raw = np.abs(phi - phi0) % 360.0
    return np.minimum(raw, 360.0 - raw)


def verify_dm_constraints(schedule: CodingSchedule, prob: DMProblem,
                          options: VerifyOptions | None = None,
                          slacks=None) -> DMVerifyReport:
    """Report the three design goals for a schedule on the problem's target.

    Channel-kind problems verify against the Bob steering defined by their
    free-space analogue only when a target angle is present; they are accepted
    here for free-space kinds.  2D schedules use per-step shifters derived from
    ``slacks`` (zero slacks by default).
    """
    if not prob.kind.startswith("freespace"):
        raise ValueError("verification needs a free-space problem (an angle target)")
    opt = options or VerifyOptions()
    cfg = prob.config
    nus = np.asarray([v for v in range(-opt.nu_max, opt.nu_max + 1)], dtype=int)
    nz = nus != 0

    if prob.kind == "freespace-1d":
        grid = np.arange(0.0, 180.0 + 1e-9, opt.grid_step_deg)
        steps_grid = step_values_1d(schedule, grid, cfg)
        steps_t0 = step_values_1d(schedule, prob.theta0_deg, cfg)
        off = np.abs(grid - prob.theta0_deg)
        peaks = grid[np.argmax(np.abs(steps_grid), axis=1)]
        beam_dev = np.abs(peaks - prob.theta0_deg)
    else:
        lam = step_shifters(prob, slacks)
        tgrid = np.arange(0.0, 90.0 + 1e-9, opt.grid_step_deg)
        pgrid = np.arange(0.0, 360.0, opt.grid_step_deg)
        tm, pm = np.meshgrid(tgrid, pgrid, indexing="ij")
        steps_grid = step_values_2d(schedule, tm.ravel(), pm.ravel(), cfg, shifter=lam)
        steps_t0 = step_values_2d(schedule, prob.theta0_deg, prob.phi0_deg, cfg, shifter=lam)
        off = np.maximum(
            np.abs(tm.ravel() - prob.theta0_deg),
            _wrapped_phi_offset(pm.ravel(), prob.phi0_deg),
        )
        idx = np.argmax(np.abs(steps_grid), axis=1)
        beam_dev = np.maximum(
            np.abs(tm.ravel()[idx] - prob.theta0_deg),
            _wrapped_phi_offset(pm.ravel()[idx], prob.phi0_deg),
        )

    w_t0 = harmonic_weights_from_steps(steps_t0[:, 0], nus)
    fund0 = max(float(np.abs(w_t0[~nz][0])), DB_FLOOR)
    suppression = float(np.max(magnitude_db(np.abs(w_t0[nz]), ref=fund0)))

    w_grid = harmonic_weights_from_steps(steps_grid, nus)  # (V, T)
    best_harm = np.abs(w_grid[nz]).max(axis=0)
    fund = np.abs(w_grid[~nz][0])
    mask = off >= opt.undesired_offset_deg
    if mask.any():
        margins = magnitude_db(best_harm[mask]) - magnitude_db(fund[mask])
        undesired_margin = float(margins.min())
    else:
        undesired_margin = float("nan")

    return DMVerifyReport(
        suppression_db=suppression,
        beam_deviation_deg=beam_dev,
        undesired_margin_db=undesired_margin,
        options=opt,
    )
