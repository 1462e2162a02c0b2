"""Depth-first branch-and-bound for the coding-sequence design problems.

The search branches on the first undetermined binary in flat (step, branch,
cell) order, explores the 0-branch first, and keeps slacks continuous
throughout.  Each node's lower bound comes from multi-start projected gradient
descent on the box relaxation; for free-space kinds the finished points then
get their slacks rescanned globally on a dense angle grid (the slacked
magnitude oscillates across the window, so pure gradient steps routinely park
in the wrong lobe) and the winner is re-polished.  A node is pruned when its
relaxation lands on an integral point (which also updates the incumbent) or
when its bound exceeds the incumbent by more than 1e-9.  Bounds from a local
NLP solver are heuristic: a start set that misses the relaxation's global
minimum can overestimate the bound and prune an optimal subtree, so exactness
is validated against :func:`exhaustive_oracle` on enumerable instances rather
than assumed.

Beyond the pruning rules above, every expanded node also rounds its relaxed
point to the nearest binary schedule and offers it as an incumbent (a primal
heuristic; it never prunes anything by itself).

An optional pruning policy (see ``lwadm.pruning``) is consulted only on nodes
the baseline rules would expand, so a policy can only shrink the visited set
on a fixed incumbent trajectory, never grow it.

Node traces for policy training record, per visited node, the feature vector in
:data:`FEATURE_COLUMNS` order followed by the baseline prune label.  Leaves
have no branching variable; they record -1 there and 0 for the CSI features.
Free-space problems record 0 for all CSI features; statistical-eavesdropper
problems record the mean over the frozen realization set.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .array_model import CodingSchedule, shifter_phases, _quantize_phase, _taper
from .objectives import DMProblem, make_evaluator, objective_value
from .seeding import child_rng

PRUNE_TOL = 1e-9
INTEGRALITY_TOL = 1e-6
GRAD_TOL = 1e-8
MAX_PGD_ITER = 500

FEATURE_COLUMNS = (
    "depth",
    "plunge_depth",
    "local_lower_bound",
    "branching_variable_value",
    "global_upper_bound",
    "solutions_found",
    "csi_ab_re",
    "csi_ab_im",
    "csi_ae_re",
    "csi_ae_im",
)

__all__ = [
    "FEATURE_COLUMNS",
    "SolveLimits",
    "SolveReport",
    "OracleResult",
    "solve",
    "solve_relaxation",
    "exhaustive_oracle",
]


@dataclass(frozen=True)
class SolveLimits:
    """Optional search budgets; exceeding one stops the run with best-so-far."""

    max_nodes: int | None = None
    max_seconds: float | None = None

    def __post_init__(self):
        if self.max_nodes is not None and self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")


@dataclass
class SolveReport:
    """Outcome of one solve: best schedule found plus search statistics.

    ``objective`` is re-evaluated through the public objective path on return,
    independently of the solver's internal evaluator.  ``wall_time`` is
    informational and is not serialized (re-runs must be byte-identical).
    """

    kind: str
    objective: float
    states: np.ndarray | None
    slacks: np.ndarray | None
    visited_nodes: int
    solutions_found: int
    limit_hit: bool
    policy: str
    seed: int
    wall_time: float = 0.0
    trace: np.ndarray | None = field(default=None, repr=False)

    def schedule(self) -> CodingSchedule:
        if self.states is None:
            raise ValueError("solve found no feasible schedule")
        return CodingSchedule(self.states)


@dataclass
class OracleResult:
    objective: float
    states: np.ndarray
    slacks: np.ndarray


# ---------------------------------------------------------------------------
# projected gradient descent on the box relaxation


def _pgd(value_fn, grad_fn, x0, lo, hi, max_iter=MAX_PGD_ITER, tol=GRAD_TOL):
    """Batched spectral projected gradient descent.

    Runs every start in lockstep.  Steps use the Barzilai-Borwein spectral
    length with a nonmonotone (10-value window) backtracking line search, the
    standard cure for the slow crawl of fixed-step descent on stiff or mildly
    nonsmooth objectives.  Stops when every start's projected-gradient norm
    falls below ``tol``, when the whole batch stalls, or after ``max_iter``
    rounds.
    """
    x = np.clip(x0, lo, hi)
    f, g = grad_fn(x)
    n_starts = x.shape[0]
    step = np.full(n_starts, 1.0)
    hist = np.tile(f[:, None], (1, 10))  # nonmonotone reference window
    best = f.min()
    since_improve = 0
    for it in range(max_iter):
        pg = x - np.clip(x - g, lo, hi)
        if np.sqrt((pg * pg).sum(axis=1)).max() <= tol:
            break
        fref = hist.max(axis=1)
        live = np.arange(n_starts)
        st = step.copy()
        new_x = x.copy()
        f_new = f.copy()
        for _bt in range(60):
            cand = np.clip(x[live] - st[live, None] * g[live], lo, hi)
            fc = value_fn(cand)
            dec = np.einsum("sd,sd->s", g[live], x[live] - cand)
            ok = fc <= fref[live] - 1e-4 * dec
            moved = np.abs(cand - x[live]).max(axis=1) > 1e-15
            take = ok & moved
            new_x[live[take]] = cand[take]
            f_new[live[take]] = fc[take]
            live = live[~take & moved]
            if live.size == 0:
                break
            st[live] *= 0.5
        g_new = grad_fn(new_x)[1]
        s = new_x - x
        y = g_new - g
        sy = np.einsum("sd,sd->s", s, y)
        ss = np.einsum("sd,sd->s", s, s)
        step = np.where(sy > 1e-12, ss / np.maximum(sy, 1e-12), 1.0)
        step = np.clip(step, 1e-10, 1e6)
        x, g, f = new_x, g_new, f_new
        hist[:, it % 10] = f
        # the moduli in the objective are nonsmooth exactly where they vanish,
        # so the gradient test may never fire; stop once the batch minimum has
        # stalled for a while instead of spinning out the iteration budget
        if f.min() < best - 1e-9:
            best = f.min()
            since_improve = 0
        else:
            since_improve += 1
            if since_improve >= 20:
                break
    return f, x


def _start_matrix(ev, n_starts, seed):
    """Deterministic multi-start set: two corners, the midpoint, then Latin
    hypercube rows drawn once per solve from the master seed."""
    lo, hi = ev.bounds()
    mid = 0.5 * (lo + hi)
    rows = [lo.copy(), hi.copy(), mid]
    n_lhs = max(n_starts - len(rows), 0)
    if n_lhs:
        rng = child_rng(seed, "mc-starts")
        span = hi - lo
        u = np.empty((n_lhs, ev.n_dims))
        for j in range(ev.n_dims):
            perm = rng.permutation(n_lhs)
            u[:, j] = (perm + rng.random(n_lhs)) / n_lhs
        rows.extend(lo + u * span)
    return np.asarray(rows[:n_starts])


def solve_relaxation(prob: DMProblem, fixed=None, seed: int = 0,
                     multistarts: int = 16, warm=None,
                     pgd_iters: int = MAX_PGD_ITER):
    """Multi-start relaxation of a (possibly partially fixed) instance.

    ``fixed`` is a flat int8 vector over the binaries: -1 free, 0/1 pinned.
    Returns (value, flat point) of the best start found.
    """
    ev = make_evaluator(prob)
    starts = _start_matrix(ev, multistarts, seed)
    fixed_arr = np.full(ev.n_binaries, -1, dtype=np.int8) if fixed is None else \
        np.asarray(fixed, dtype=np.int8)
    return _relax_node(ev, starts, fixed_arr, warm, pgd_iters,
                       rescan=_SlackRescan(ev, prob))


def _node_bounds(ev, fixed):
    lo, hi = ev.bounds()
    pinned = fixed >= 0
    lo[: ev.n_binaries][pinned] = fixed[pinned]
    hi[: ev.n_binaries][pinned] = fixed[pinned]
    return lo, hi


class _SlackRescan:
    """Global per-step slack reseeding for the free-space relaxations.

    |Xi(q, theta0+d)| oscillates across the slack window, so gradient steps
    started in the wrong lobe converge to a poor stationary point and the
    node bound comes out too high (which can wrongly prune an optimal
    subtree).  Given finished relaxation points this rewrites each step's
    slack with a dense-grid argmax of the slacked magnitude at the relaxed
    binaries, exact per step in 1D.  In 2D the step's shifter setting also
    enters the target-angle term, so the scan is only a reseeding heuristic
    there; the caller re-polishes with the gradient method either way.
    """

    def __init__(self, ev, prob, step_deg: float = 0.2):
        self.ev = ev
        self.prob = prob
        self.active = prob.n_slack_axes > 0 and prob.kind.startswith("freespace")
        if not self.active:
            return
        cfg = prob.config
        n = np.arange(cfg.n_cells)
        taper = _taper(cfg)
        self.grids = []
        self.mats = []
        self.pairs = []
        for lo, hi in prob.slack_bounds_deg:
            g = np.arange(lo, hi + 1e-12, step_deg) if hi > lo else np.array([lo])
            if g[-1] < hi - 1e-9:
                g = np.append(g, hi)
            self.grids.append(g)
            if prob.kind == "freespace-1d":
                k0p = cfg.wavenumber * cfg.cell_period
                th = np.deg2rad(prob.theta0_deg + g)
                self.mats.append(taper * np.exp(1j * k0p * np.cos(th)[:, None] * n))
            else:
                m = np.arange(cfg.n_branches)
                k0 = cfg.wavenumber
                d1, d2 = np.meshgrid(g, g, indexing="ij")
                d1, d2 = d1.ravel(), d2.ravel()
                th = np.deg2rad(prob.theta0_deg + d1)
                ph = np.deg2rad(prob.phi0_deg + d2)
                ideal = m * (k0 * cfg.spacing) * (np.sin(th) * np.cos(ph))[:, None]
                lam = np.exp(-1j * _quantize_phase(ideal, cfg.shifter_bits))
                bd = taper * np.exp(
                    1j * k0 * cfg.cell_period * (np.sin(th) * np.sin(ph))[:, None] * n
                )
                cd = np.exp(1j * k0 * cfg.spacing * (np.sin(th) * np.cos(ph))[:, None] * m)
                self.mats.append((lam * cd)[:, :, None] * bd[:, None, :])
                self.pairs.append(np.stack([d1, d2], axis=1))

    def reseed(self, x):
        """Copy of the point batch with slacks rewritten; binaries untouched."""
        ev, prob = self.ev, self.prob
        q, d = ev.unpack(x)
        gamma = ev._gamma(q)  # (S, L, M, N)
        d = d.copy()
        for u in range(prob.n_steps):
            if prob.kind == "freespace-1d":
                mags = np.abs(gamma[:, u, 0, :] @ self.mats[u].T)  # (S, G)
                d[:, u, 0] = self.grids[u][np.argmax(mags, axis=1)]
            else:
                mags = np.abs(np.einsum("gmn,smn->sg", self.mats[u], gamma[:, u]))
                d[:, u, :] = self.pairs[u][np.argmax(mags, axis=1)]
        return ev.pack(q.reshape(x.shape[0], -1), d.reshape(x.shape[0], -1))


def _relax_node(ev, starts, fixed, warm, max_iter=MAX_PGD_ITER, rescan=None):
    lo, hi = _node_bounds(ev, fixed)
    x0 = starts if warm is None else np.vstack([starts, warm[None]])
    f, x = _pgd(ev.value_flat, ev.grad_flat, x0, lo, hi, max_iter=max_iter)
    k = int(np.argmin(f))
    fk, xk = float(f[k]), x[k]
    if rescan is not None and rescan.active:
        x2 = rescan.reseed(x)
        f2 = ev.value_flat(x2)
        j = int(np.argmin(f2))
        # polish the rescanned winner so the slack settles inside its lobe
        f3, x3 = _pgd(ev.value_flat, ev.grad_flat, x2[j][None], lo, hi,
                      max_iter=max_iter)
        if float(f3[0]) < fk:
            fk, xk = float(f3[0]), x3[0]
    return fk, xk


# ---------------------------------------------------------------------------
# exact evaluation of fully-determined schedules


class _LeafEval:
    """Exact objective of a binary schedule with slack handling.

    Slack mode is either a shared grid (scan, matching the exhaustive oracle)
    or continuous (projected gradient polish within the windows).
    """

    def __init__(self, ev, prob, grid_step, starts, pgd_iters=MAX_PGD_ITER,
                 rescan=None):
        self.ev = ev
        self.prob = prob
        self.grid_step = grid_step
        self.pgd_iters = pgd_iters
        self.rescan = rescan
        self.slack_starts = starts[:, ev.n_binaries:]
        if prob.n_slack_axes and grid_step is not None:
            self.grids = [
                np.arange(lo, hi + 1e-12, grid_step) if hi > lo else np.array([lo])
                for lo, hi in prob.slack_bounds_deg
            ]
            if prob.kind == "freespace-1d":
                self._prep_grid_1d()
            else:
                self._prep_grid_2d()

    def _prep_grid_1d(self):
        cfg = self.prob.config
        n = np.arange(cfg.n_cells)
        k0p = cfg.wavenumber * cfg.cell_period
        taper = _taper(cfg)
        self.e0 = taper * np.exp(1j * k0p * n * np.cos(np.deg2rad(self.prob.theta0_deg)))
        self.ed = [
            taper * np.exp(
                1j * k0p * np.cos(np.deg2rad(self.prob.theta0_deg + g))[:, None] * n
            )
            for g in self.grids
        ]  # per step: (G, N)

    def _prep_grid_2d(self):
        prob, cfg = self.prob, self.prob.config
        n = np.arange(cfg.n_cells)
        m = np.arange(cfg.n_branches)
        k0 = cfg.wavenumber
        taper = _taper(cfg)
        th0, ph0 = np.deg2rad(prob.theta0_deg), np.deg2rad(prob.phi0_deg)
        b0 = taper * np.exp(1j * k0 * cfg.cell_period * np.sin(th0) * np.sin(ph0) * n)
        c0 = np.exp(1j * k0 * cfg.spacing * np.sin(th0) * np.cos(ph0) * m)
        self.d0 = []  # per step: (G, M, N) factors at the target angle
        self.dd = []  # per step: (G, M, N) factors at the slacked angle
        for g in self.grids:
            d1, d2 = np.meshgrid(g, g, indexing="ij")
            d1, d2 = d1.ravel(), d2.ravel()
            th = th0 + np.deg2rad(d1)
            ph = ph0 + np.deg2rad(d2)
            ideal = m * (k0 * cfg.spacing) * (np.sin(th) * np.cos(ph))[:, None]
            lam = np.exp(-1j * _quantize_phase(ideal, cfg.shifter_bits))  # (G, M)
            bd = taper * np.exp(
                1j * k0 * cfg.cell_period * (np.sin(th) * np.sin(ph))[:, None] * n
            )
            cd = np.exp(1j * k0 * cfg.spacing * (np.sin(th) * np.cos(ph))[:, None] * m)
            self.d0.append((lam * c0)[:, :, None] * b0[None, None, :])
            self.dd.append((lam * cd)[:, :, None] * bd[:, None, :])
            self._slack_pairs = getattr(self, "_slack_pairs", [])
            self._slack_pairs.append(np.stack([d1, d2], axis=1))

    def value(self, states):
        """(objective, slacks) for exact binary states (L, M, N)."""
        ev, prob = self.ev, self.prob
        if prob.n_slack_axes == 0:
            x = ev.pack(states.astype(float), np.zeros((1, 0)))
            return float(ev.value_flat(x)[0]), np.zeros((prob.n_steps, 0))
        if self.grid_step is None:
            return self._value_continuous(states)
        return self._value_grid(states)

    def _value_continuous(self, states):
        ev, prob = self.ev, self.prob
        fixed = states.reshape(-1).astype(np.int8)
        lo, hi = _node_bounds(ev, fixed)
        qrow = np.tile(states.reshape(1, -1).astype(float), (self.slack_starts.shape[0], 1))
        x0 = np.concatenate([qrow, self.slack_starts], axis=1)
        if self.rescan is not None and self.rescan.active:
            x0 = np.vstack([x0, self.rescan.reseed(x0[:1])])
        f, x = _pgd(ev.value_flat, ev.grad_flat, x0, lo, hi, max_iter=self.pgd_iters)
        k = int(np.argmin(f))
        return float(f[k]), x[k, ev.n_binaries:].reshape(prob.n_steps, -1)

    def _value_grid(self, states):
        prob = self.prob
        gamma = self.ev._gamma(states[None].astype(float))[0]  # (L, M, N)
        if prob.kind == "freespace-1d":
            xi0 = gamma[:, 0, :] @ self.e0
            first = float(np.abs(xi0[1:] - xi0[0]).sum())
            second = 0.0
            slacks = np.zeros((prob.n_steps, 1))
            for u in range(prob.n_steps):
                mags = np.abs(self.ed[u] @ gamma[u, 0, :])
                k = int(np.argmax(mags))
                second += float(mags[k])
                slacks[u, 0] = self.grids[u][k]
            return first - second, slacks
        # 2D: the target-angle value depends on the step's shifter setting, so
        # the slack choice couples step 1 with every other step.
        xi0 = [np.einsum("gmn,mn->g", self.d0[u], gamma[u]) for u in range(prob.n_steps)]
        xid = [np.einsum("gmn,mn->g", self.dd[u], gamma[u]) for u in range(prob.n_steps)]
        best = np.inf
        best_g = None
        for g1 in range(xi0[0].size):
            total = -np.abs(xid[0][g1])
            picks = [g1]
            for u in range(1, prob.n_steps):
                vals = np.abs(xi0[u] - xi0[0][g1]) - np.abs(xid[u])
                k = int(np.argmin(vals))
                total += float(vals[k])
                picks.append(k)
            if total < best - 1e-15:
                best = total
                best_g = picks
        slacks = np.asarray(
            [self._slack_pairs[u][g] for u, g in enumerate(best_g)]
        )
        return float(best), slacks


# ---------------------------------------------------------------------------
# the branch-and-bound loop


def _csi_features(prob):
    n = prob.config.n_cells
    ab = prob.csi_bob if prob.csi_bob is not None else np.zeros(n, dtype=complex)
    if prob.csi_eve is None:
        ae = np.zeros(n, dtype=complex)
    else:
        ae = np.atleast_2d(prob.csi_eve).mean(axis=0)
    return ab, ae


def solve(prob: DMProblem, seed: int = 0, limits: SolveLimits | None = None,
          policy=None, policy_name: str = "baseline",
          slack_grid_step_deg: float | None = None, collect_trace: bool = False,
          multistarts: int = 16, pgd_iters: int = MAX_PGD_ITER) -> SolveReport:
    """Depth-first branch-and-bound over the binary codewords.

    Parameters
    ----------
    prob : DMProblem
    seed : int
        Master seed; only the multi-start sample points derive from it, so two
        runs with equal (instance, seed) produce identical reports.
    limits : SolveLimits
        Node/time budgets; hitting one sets ``limit_hit`` and returns
        best-so-far (time budgets make reports machine-dependent, node budgets
        do not).
    policy : callable or None
        Extra pruning policy consulted on baseline-expanded nodes; receives the
        node's feature vector (FEATURE_COLUMNS order) and returns True to
        prune.
    slack_grid_step_deg : float or None
        When set, fully-determined schedules pick slacks by scanning this grid
        (the convention shared with :func:`exhaustive_oracle`); otherwise
        slacks are polished continuously inside their windows.
    collect_trace : bool
        Record per-node features plus the baseline prune label.
    multistarts, pgd_iters : int
        Relaxation effort knobs; lowering them trades bound quality for node
        throughput (defaults match the documented stopping contract).
    """
    t0 = time.perf_counter()
    limits = limits or SolveLimits()
    ev = make_evaluator(prob)
    nb = ev.n_binaries
    starts = _start_matrix(ev, multistarts, seed)
    rescan = _SlackRescan(ev, prob)
    leaf = _LeafEval(ev, prob, slack_grid_step_deg, starts, pgd_iters,
                     rescan=rescan)
    ab, ae = _csi_features(prob)
    n_cells = prob.config.n_cells

    upper = np.inf
    best_states = None
    best_slacks = None
    visited = 0
    solutions = 0
    limit_hit = False
    trace_rows = [] if collect_trace else None

    def consider(states, value, slacks):
        nonlocal upper, best_states, best_slacks, solutions
        if value < upper:
            upper = value
            best_states = states.copy()
            best_slacks = slacks.copy()
            solutions += 1

    def shape_states(flat):
        return np.asarray(flat, dtype=np.uint8).reshape(
            prob.n_steps, prob.n_branches, n_cells
        )

    root = np.full(nb, -1, dtype=np.int8)
    stack = [(root, 0, None)]  # (fixed, plunge_depth, warm start)

    while stack:
        if limits.max_nodes is not None and visited >= limits.max_nodes:
            limit_hit = True
            break
        if limits.max_seconds is not None and time.perf_counter() - t0 >= limits.max_seconds:
            limit_hit = True
            break
        fixed, plunge, warm = stack.pop()
        visited += 1
        free = np.flatnonzero(fixed < 0)
        depth = nb - free.size

        if free.size == 0:
            states = shape_states(fixed)
            value, slacks = leaf.value(states)
            if trace_rows is not None:
                trace_rows.append(
                    [depth, plunge, value, -1.0,
                     upper if np.isfinite(upper) else np.inf,
                     solutions, 0.0, 0.0, 0.0, 0.0, 1.0]
                )
            consider(states, value, slacks)
            continue

        branch_idx = int(free[0])
        bound, xrel = _relax_node(ev, starts, fixed, warm, pgd_iters, rescan=rescan)
        qrel = xrel[:nb]
        integral = np.abs(qrel[free] - np.rint(qrel[free])).max() <= INTEGRALITY_TOL

        cell = branch_idx % n_cells
        features = np.array(
            [depth, plunge, bound, qrel[branch_idx],
             upper if np.isfinite(upper) else np.inf,
             solutions, ab[cell].real, ab[cell].imag, ae[cell].real, ae[cell].imag]
        )

        if integral:
            states = shape_states(np.rint(qrel))
            value, slacks = leaf.value(states)
            consider(states, value, slacks)
            pruned = True
        elif bound > upper + PRUNE_TOL:
            pruned = True
        else:
            pruned = False

        if trace_rows is not None:
            trace_rows.append(list(features) + [1.0 if pruned else 0.0])

        if pruned:
            continue

        # primal rounding: feasible incumbent from the relaxed point.  in grid
        # mode the rounded schedule is valued with the same grid convention as
        # leaves (so the report stays comparable to the enumeration oracle);
        # otherwise the relaxed slacks are kept as-is, cheap and feasible.
        rstates = shape_states(np.rint(np.clip(qrel, 0.0, 1.0)))
        if prob.n_slack_axes and slack_grid_step_deg is not None:
            rval, rslacks = leaf.value(rstates)
        else:
            rx = ev.pack(rstates.astype(float).reshape(1, -1),
                         xrel[nb:].reshape(1, -1))
            rval = float(ev.value_flat(rx)[0])
            rslacks = xrel[nb:].reshape(prob.n_steps, -1)
        consider(rstates, rval, rslacks)

        if policy is not None and policy(features):
            continue

        one = fixed.copy()
        one[branch_idx] = 1
        zero = fixed.copy()
        zero[branch_idx] = 0
        stack.append((one, 0, xrel))
        stack.append((zero, plunge + 1, xrel))

    if best_states is not None:
        objective = objective_value(prob, best_states, best_slacks)
    else:
        objective = np.inf

    return SolveReport(
        kind=prob.kind,
        objective=float(objective),
        states=best_states,
        slacks=best_slacks,
        visited_nodes=visited,
        solutions_found=solutions,
        limit_hit=limit_hit,
        policy=policy_name,
        seed=seed,
        wall_time=time.perf_counter() - t0,
        trace=np.asarray(trace_rows) if trace_rows is not None else None,
    )


# ---------------------------------------------------------------------------
# exhaustive enumeration oracle


MAX_ENUM_BITS = 20


def _row_bits(n_cells):
    rows = np.arange(1 << n_cells, dtype=np.int64)
    return ((rows[:, None] >> np.arange(n_cells)) & 1).astype(np.uint8)


def exhaustive_oracle(prob: DMProblem, slack_grid_step_deg: float = 0.5,
                      chunk: int = 1 << 16) -> OracleResult:
    """Global optimum by enumerating every binary schedule.

    Free-space slacks are scanned on the given per-step grid (the same
    convention ``solve`` uses when given ``slack_grid_step_deg``), so the two
    are comparable.  Refuses instances with more than 2**20 schedules.
    """
    n_bits = prob.n_binaries
    if n_bits > MAX_ENUM_BITS:
        raise ValueError(f"instance too large to enumerate (2^{n_bits} schedules)")
    if prob.kind == "freespace-2d":
        return _oracle_2d(prob, slack_grid_step_deg)

    cfg = prob.config
    n, L = cfg.n_cells, prob.n_steps
    bits = _row_bits(n)  # (R, N)
    ev = make_evaluator(prob)
    gamma = ev._gamma(bits[:, None, None, :].astype(float))[:, 0, 0, :]  # (R, N)
    taper = _taper(cfg)

    if prob.kind == "freespace-1d":
        k0p = cfg.wavenumber * cfg.cell_period
        narr = np.arange(n)
        e0 = taper * np.exp(1j * k0p * narr * np.cos(np.deg2rad(prob.theta0_deg)))
        xi0 = gamma @ e0  # (R,)
        grids, win_max, win_arg = [], [], []
        for lo, hi in prob.slack_bounds_deg:
            g = np.arange(lo, hi + 1e-12, slack_grid_step_deg) if hi > lo else np.array([lo])
            ed = taper * np.exp(
                1j * k0p * np.cos(np.deg2rad(prob.theta0_deg + g))[:, None] * narr
            )
            mags = np.abs(gamma @ ed.T)  # (R, G)
            grids.append(g)
            win_max.append(mags.max(axis=1))
            win_arg.append(mags.argmax(axis=1))
        score_tables = None
    else:
        xi_b = gamma @ (taper * prob.csi_bob)
        eve = np.atleast_2d(prob.csi_eve)
        xi_e = gamma @ (taper * eve).T  # (R, Nt)
        score_tables = (xi_b, xi_e)

    total = 1 << n_bits
    mask = (1 << n) - 1
    best_val = np.inf
    best_assign = 0
    for lo_c in range(0, total, chunk):
        assign = np.arange(lo_c, min(lo_c + chunk, total), dtype=np.int64)
        digits = [(assign >> (u * n)) & mask for u in range(L)]
        if prob.kind == "freespace-1d":
            obj = -win_max[0][digits[0]].copy()
            for u in range(1, L):
                obj += np.abs(xi0[digits[u]] - xi0[digits[0]])
                obj -= win_max[u][digits[u]]
        else:
            xi_b, xi_e = score_tables
            obj = np.zeros(assign.size)
            for u in range(1, L):
                obj += np.abs(xi_b[digits[u]] - xi_b[digits[0]])
                obj -= np.abs(xi_e[digits[u]] - xi_e[digits[0]]).mean(axis=1)
        k = int(np.argmin(obj))
        if obj[k] < best_val:
            best_val = float(obj[k])
            best_assign = int(assign[k])

    rows = [(best_assign >> (u * n)) & mask for u in range(L)]
    states = np.asarray([bits[r] for r in rows], dtype=np.uint8)[:, None, :]
    if prob.kind == "freespace-1d":
        slacks = np.asarray(
            [[grids[u][win_arg[u][rows[u]]]] for u in range(L)]
        )
    else:
        slacks = np.zeros((L, 0))
    return OracleResult(objective=best_val, states=states, slacks=slacks)


def _oracle_2d(prob: DMProblem, grid_step: float) -> OracleResult:
    cfg = prob.config
    L, M, N = prob.n_steps, cfg.n_branches, cfg.n_cells
    slabs = _row_bits(M * N).reshape(-1, M, N)  # (P, M, N)
    ev = make_evaluator(prob)
    gamma = ev._gamma(slabs[:, None].astype(float))[:, 0]  # (P, M, N)
    leaf = _LeafEval(ev, prob, grid_step, np.zeros((1, ev.n_dims)))

    xi0 = [np.einsum("gmn,pmn->pg", leaf.d0[u], gamma) for u in range(L)]
    xid = [np.einsum("gmn,pmn->pg", leaf.dd[u], gamma) for u in range(L)]

    best = np.inf
    pick = None
    p1 = xi0[0].shape[0]
    for s1 in range(p1):
        for g1 in range(xi0[0].shape[1]):
            total = -np.abs(xid[0][s1, g1])
            choice = [(s1, g1)]
            for u in range(1, L):
                vals = np.abs(xi0[u] - xi0[0][s1, g1]) - np.abs(xid[u])
                k = int(np.argmin(vals))
                su, gu = np.unravel_index(k, vals.shape)
                total += float(vals[su, gu])
                choice.append((int(su), int(gu)))
            if total < best:
                best = float(total)
                pick = choice
    states = np.asarray([slabs[s] for s, _ in pick], dtype=np.uint8)
    slacks = np.asarray([leaf._slack_pairs[u][g] for u, (_, g) in enumerate(pick)])
    return OracleResult(objective=best, states=states, slacks=slacks)
