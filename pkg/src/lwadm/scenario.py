"""Scenario files: one JSON document that fully determines a run.

A scenario nests plain sections (array, problem, ofdm, sweeps, solver,
verify, schedule, train) over documented defaults; unknown keys are rejected
so typos fail loudly.  Commands echo the fully-resolved scenario into their
manifest, and a manifest can itself be passed back as a scenario (the
resolved copy under its "scenario" key is used), which is what makes re-runs
byte-identical.

Channel state is never stored in scenarios: the problem section carries
generator parameters (kind, correlation, angle) and the draws are re-derived
from the master seed through fixed stream labels ("channel/bob",
"channel/eve-<i>"), so echoing the scenario is enough to reproduce them.
"""

from __future__ import annotations

import copy
import json

import numpy as np

from .array_model import ArrayConfig, CodingSchedule
from .link import CHANNEL_KINDS, OFDMConfig, generate_channel
from .objectives import PROBLEM_KINDS, DMProblem, VerifyOptions
from .seeding import child_seed
from .solver import SolveLimits

__all__ = [
    "DEFAULTS",
    "load_scenario",
    "resolve_scenario",
    "build_array",
    "build_ofdm",
    "build_problem",
    "build_limits",
    "build_verify",
    "eval_eve_csi",
    "grid_values",
    "schedule_from_scenario",
    "read_schedule_file",
    "schedule_text",
    "write_schedule_file",
    "manifest_text",
]

DEFAULTS = {
    "seed": 0,
    "out_dir": None,
    "array": {
        "n_cells": 9,
        "n_branches": 1,
        "cell_period": 0.015,
        "branch_spacing": None,
        "leakage": 0.0,
        "phase0_deg": -18.0,
        "phase1_deg": 15.0,
        "carrier_freq": 1.95e9,
        "mod_freq": 15.0e3,
        "shifter_bits": 8,
    },
    "problem": {
        "kind": "freespace-1d",
        "n_steps": 2,
        "theta0_deg": 88.0,
        "phi0_deg": None,
        "slack_bounds_deg": None,  # None -> per-step [-10, 10] for free-space kinds
        "channel": {
            "kind": "rayleigh-iid",
            "bob_kind": None,
            "rho": None,
            "theta_deg": None,
            "n_eve_realizations": 1,
            "n_eval_eve": None,
        },
    },
    "ofdm": {
        "n_subcarriers": 64,
        "subcarrier_width": 15.0e3,
        "carrier_freq": 1.95e9,
        "bits_per_frame": 499968,
        "n_frames": 1,
    },
    "sweeps": {
        "theta_grid_deg": {"start": 0.0, "stop": 180.0, "step": 0.5},
        "phi_grid_deg": None,
        "phi_deg": None,
        "eb_n0_db": 15.0,
        "ebn0_grid_db": {"start": 0.0, "stop": 20.0, "step": 2.0},
        "nu_range": [-3, 3],
        "include_static": True,
        "bob_theta_deg": None,
    },
    "solver": {
        "max_nodes": None,
        "max_seconds": None,
        "slack_grid_step_deg": None,
        "multistarts": 16,
        "pgd_iters": 500,
        "policy": "baseline",
    },
    "verify": {
        "grid_step_deg": 0.1,
        "nu_max": 20,
        "undesired_offset_deg": 10.0,
    },
    "schedule": {
        "states": None,
        "file": None,
        "slacks": None,
    },
    "train": {
        "rounds": None,  # list of per-round instance counts; None -> [n_train]
        "n_train": 4,
        "n_holdout": 2,
        "epochs": 50,
        "batch_size": 128,
        "lr_first": 1e-3,
        "lr_later": 1e-4,
        "momentum": 0.9,
    },
}


# grid specs may be given as {start, stop, step} or as explicit lists, so they
# are copied verbatim instead of key-merged like the scenario sections
_LEAF_KEYS = {"theta_grid_deg", "ebn0_grid_db", "phi_grid_deg"}


def _merge(defaults, given, path):
    if not isinstance(given, dict):
        raise ValueError(f"scenario section {path or 'root'} must be an object")
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        if key not in defaults:
            raise ValueError(f"unknown scenario key {path + key!r}")
        if (isinstance(defaults[key], dict) and defaults[key]
                and key not in _LEAF_KEYS):
            out[key] = _merge(defaults[key], val if val is not None else {},
                              path + key + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


def load_scenario(path: str) -> dict:
    """Read a scenario (or a manifest, whose resolved scenario is used)."""
    with open(path) as fh:
        raw = json.load(fh)
    if isinstance(raw, dict) and set(raw) >= {"command", "scenario"}:
        raw = raw["scenario"]
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: scenario must be a JSON object")
    return raw


def resolve_scenario(raw: dict, seed: int | None = None,
                     out_dir: str | None = None, policy: str | None = None) -> dict:
    """Apply defaults and command-line overrides; returns the echoed form."""
    scen = _merge(DEFAULTS, raw, "")
    if seed is not None:
        scen["seed"] = int(seed)
    if out_dir is not None:
        scen["out_dir"] = out_dir
    if policy is not None:
        scen["solver"]["policy"] = policy
    if not isinstance(scen["seed"], int) or scen["seed"] < 0:
        raise ValueError("seed must be a nonnegative integer")
    return scen


def build_array(scen: dict) -> ArrayConfig:
    sec = scen["array"]
    return ArrayConfig(**sec)


def build_ofdm(scen: dict) -> OFDMConfig:
    sec = dict(scen["ofdm"])
    return OFDMConfig(seed=scen["seed"], **sec)


def _chan_kwargs(kind: str, sec: dict, config: ArrayConfig) -> dict:
    if kind not in CHANNEL_KINDS:
        raise ValueError(f"unknown channel kind {kind!r}")
    kw = {}
    if kind == "doubly-correlated":
        kw["rho"] = sec["rho"]
    if kind == "line-of-sight-angle":
        kw["config"] = config
        kw["theta_deg"] = sec["theta_deg"]
    return kw


def _draw_csi(scen: dict, config: ArrayConfig, seed: int):
    """(bob gains, eve gains) from the problem's generator parameters.

    ``bob_kind`` lets the legitimate link use a different fading model than
    the eavesdropper population (it defaults to the shared ``kind``).
    """
    sec = scen["problem"]["channel"]
    kind = sec["kind"]
    bob_kind = sec["bob_kind"] or kind
    bkw = _chan_kwargs(bob_kind, sec, config)
    ekw = _chan_kwargs(kind, sec, config)
    bob = generate_channel(bob_kind, config.n_cells, child_seed(seed, "channel/bob"), **bkw).gains
    n_eve = int(sec["n_eve_realizations"])
    if n_eve < 1:
        raise ValueError("n_eve_realizations must be >= 1")
    eve = np.vstack([
        generate_channel(kind, config.n_cells, child_seed(seed, f"channel/eve-{i}"), **ekw).gains
        for i in range(n_eve)
    ])
    return bob, eve


def eval_eve_csi(scen: dict, config: ArrayConfig, seed: int | None = None):
    """Held-out eavesdropper draws for link sweeps, or None when unset.

    These come from the same statistics as the frozen optimization set but
    under separate seed labels, so reliability numbers are measured against
    eavesdroppers the sequence designer never saw.
    """
    sec = scen["problem"]["channel"]
    n = sec["n_eval_eve"]
    if n is None:
        return None
    n = int(n)
    if n < 1:
        raise ValueError("n_eval_eve must be >= 1 when given")
    kind = sec["kind"]
    kw = _chan_kwargs(kind, sec, config)
    root = scen["seed"] if seed is None else seed
    return np.vstack([
        generate_channel(kind, config.n_cells,
                         child_seed(root, f"channel/eval-eve-{i}"), **kw).gains
        for i in range(n)
    ])


def build_problem(scen: dict, config: ArrayConfig, seed: int | None = None) -> DMProblem:
    sec = scen["problem"]
    kind = sec["kind"]
    if kind not in PROBLEM_KINDS:
        raise ValueError(f"unknown problem kind {kind!r}")
    slack = sec["slack_bounds_deg"]
    if slack is not None:
        slack = np.asarray(slack, dtype=float)
    csi_bob = csi_eve = None
    if kind.startswith("channel"):
        bob, eve = _draw_csi(scen, config, scen["seed"] if seed is None else seed)
        csi_bob = bob
        csi_eve = eve[0] if kind == "channel-perfect" else eve
        if kind == "channel-perfect" and eve.shape[0] != 1:
            raise ValueError("channel-perfect takes exactly one eavesdropper realization")
    return DMProblem(
        kind=kind,
        config=config,
        n_steps=int(sec["n_steps"]),
        theta0_deg=sec["theta0_deg"] if kind.startswith("freespace") else None,
        phi0_deg=sec["phi0_deg"] if kind == "freespace-2d" else None,
        slack_bounds_deg=slack if kind.startswith("freespace") else None,
        csi_bob=csi_bob,
        csi_eve=csi_eve,
    )


def build_limits(scen: dict) -> SolveLimits:
    sec = scen["solver"]
    return SolveLimits(max_nodes=sec["max_nodes"], max_seconds=sec["max_seconds"])


def build_verify(scen: dict) -> VerifyOptions:
    return VerifyOptions(**scen["verify"])


def grid_values(spec) -> np.ndarray:
    """A grid given either as an explicit list or as {start, stop, step}."""
    if isinstance(spec, dict):
        missing = {"start", "stop", "step"} - set(spec)
        if missing or set(spec) - {"start", "stop", "step"}:
            raise ValueError("grid spec needs exactly start/stop/step")
        start, stop, step = (float(spec[k]) for k in ("start", "stop", "step"))
        if step <= 0.0 or stop < start:
            raise ValueError("grid spec needs step > 0 and stop >= start")
        return np.arange(start, stop + 0.5 * step, step)
    arr = np.asarray(spec, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError("empty grid")
    return arr


# ---------------------------------------------------------------------------
# schedule files: "L M N" header, then L*M rows of N binary entries


def schedule_text(schedule: CodingSchedule) -> str:
    arr = schedule.states
    lines = ["%d %d %d" % arr.shape]
    for u in range(arr.shape[0]):
        for m in range(arr.shape[1]):
            lines.append(" ".join(str(int(v)) for v in arr[u, m]))
    return "\n".join(lines) + "\n"


def write_schedule_file(path: str, schedule: CodingSchedule):
    with open(path, "w") as fh:
        fh.write(schedule_text(schedule))


def read_schedule_file(path: str) -> CodingSchedule:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: expected 'L M N' header")
        l_steps, m_branches, n_cells = (int(v) for v in header)
        rows = [ln.split() for ln in fh if ln.strip()]
    if len(rows) != l_steps * m_branches:
        raise ValueError(f"{path}: expected {l_steps * m_branches} rows")
    arr = np.asarray(rows, dtype=np.uint8).reshape(l_steps, m_branches, n_cells)
    return CodingSchedule(arr)


def schedule_from_scenario(scen: dict, config: ArrayConfig) -> CodingSchedule:
    """Inline states, or a file produced by the solve command."""
    sec = scen["schedule"]
    if sec["states"] is not None:
        arr = np.asarray(sec["states"], dtype=np.uint8)
        if arr.ndim == 2:
            arr = arr[:, None, :]
        return CodingSchedule(arr)
    if sec["file"] is not None:
        sched = read_schedule_file(sec["file"])
        if sched.n_cells != config.n_cells:
            raise ValueError("schedule file does not match the array's cell count")
        return sched
    raise ValueError("scenario needs schedule.states or schedule.file")


def manifest_text(command: str, scen: dict) -> str:
    return json.dumps({"command": command, "scenario": scen},
                      indent=2, sort_keys=True) + "\n"
