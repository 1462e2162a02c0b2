"""Learned node-pruning policies for the branch-and-bound solver.

A small multilayer perceptron imitates the solver's baseline pruning rules
from recorded node traces and is then consulted on nodes the baseline would
expand; the solver prunes when either the baseline rules or the network say
so, which keeps every baseline prune and can only remove additional nodes.
Labels always come from baseline traces, never from runs that already used a
network, so training targets stay fixed across fine-tuning rounds.

The feature layout is :data:`FEATURE_NAMES` (the solver's trace order).  Two
sentinels appear in raw traces: the incumbent objective is ``inf`` until a
first solution exists, and leaves carry -1 as the branching-variable value
with zeroed CSI features.  Features are z-normalized with corpus statistics
and clamped to [-3, 3]; the infinite-incumbent sentinel maps to +3.

The network is implemented directly on numpy arrays (the package carries no
learning-framework dependency); training is plain minibatch SGD with momentum
on a class-weighted cross-entropy.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .seeding import child_rng, child_seed
from .solver import FEATURE_COLUMNS, SolveLimits, solve

FEATURE_NAMES = FEATURE_COLUMNS
N_FEATURES = len(FEATURE_NAMES)
HIDDEN = (200, 200, 200)
CLAMP = 3.0

__all__ = [
    "FEATURE_NAMES",
    "NodeFeatures",
    "PruningNet",
    "TrainingCorpus",
    "make_policy",
    "save_trace",
    "load_trace",
    "collect_training_data",
    "train_policy",
    "speed_metric",
]


@dataclass(frozen=True)
class NodeFeatures:
    """One node's feature vector, field-per-feature view of a trace row."""

    depth: float
    plunge_depth: float
    local_lower_bound: float
    branching_variable_value: float
    global_upper_bound: float
    solutions_found: float
    csi_ab_re: float
    csi_ab_im: float
    csi_ae_re: float
    csi_ae_im: float

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])

    @classmethod
    def from_array(cls, row) -> "NodeFeatures":
        row = np.asarray(row, dtype=float).reshape(-1)
        if row.size < N_FEATURES:
            raise ValueError("feature row too short")
        return cls(**{name: float(row[i]) for i, name in enumerate(FEATURE_NAMES)})


def _relu(x):
    return np.maximum(x, 0.0)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class PruningNet:
    """MLP over node features returning a prune probability.

    Layers 10 -> 200 -> 200 -> 200 -> 1 with ReLU activations and a sigmoid
    output; a node is pruned when the probability reaches ``threshold``.
    """

    FORMAT = "lwadm-pruning-net v1"

    def __init__(self, weights, biases, mean, std, threshold=0.5):
        self.weights = [np.asarray(w, dtype=float) for w in weights]
        self.biases = [np.asarray(b, dtype=float) for b in biases]
        self.mean = np.asarray(mean, dtype=float)
        self.std = np.asarray(std, dtype=float)
        self.threshold = float(threshold)
        sizes = (N_FEATURES,) + HIDDEN + (1,)
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
                raise ValueError("weight shapes do not match the architecture")

    @classmethod
    def initialize(cls, seed: int) -> "PruningNet":
        """He-initialized network (stream label "net-init")."""
        rng = child_rng(seed, "net-init")
        sizes = (N_FEATURES,) + HIDDEN + (1,)
        weights = [
            rng.standard_normal((sizes[i], sizes[i + 1])) * np.sqrt(2.0 / sizes[i])
            for i in range(len(sizes) - 1)
        ]
        biases = [np.zeros(sizes[i + 1]) for i in range(len(sizes) - 1)]
        return cls(weights, biases, np.zeros(N_FEATURES), np.ones(N_FEATURES))

    def set_normalization(self, rows):
        """Fit feature mean/std on finite entries of the given trace rows."""
        x = np.asarray(rows, dtype=float)[:, :N_FEATURES]
        finite = np.isfinite(x)
        safe = np.where(finite, x, 0.0)
        cnt = np.maximum(finite.sum(axis=0), 1)
        mean = safe.sum(axis=0) / cnt
        var = ((safe - mean) ** 2 * finite).sum(axis=0) / cnt
        std = np.sqrt(var)
        self.mean = mean
        self.std = np.where(std > 1e-12, std, 1.0)

    def normalize(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))[:, :N_FEATURES]
        z = (x - self.mean) / self.std
        # the no-incumbent sentinel is +inf; it lands on the upper clamp
        z = np.where(np.isfinite(z), z, CLAMP * np.sign(np.where(np.isfinite(x), 1.0, x)))
        return np.clip(z, -CLAMP, CLAMP)

    def _forward(self, z):
        h = z
        cache = [h]
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = _relu(h @ w + b)
            cache.append(h)
        logits = (h @ self.weights[-1] + self.biases[-1])[:, 0]
        return logits, cache

    def predict_proba(self, features) -> np.ndarray:
        z = self.normalize(features)
        logits, _ = self._forward(z)
        return _sigmoid(logits)

    def predict(self, features) -> np.ndarray:
        return self.predict_proba(features) >= self.threshold

    # -- serialization: a small self-describing text format ----------------

    def to_text(self) -> str:
        parts = [self.FORMAT]
        parts.append("layers " + " ".join(str(s) for s in (N_FEATURES,) + HIDDEN + (1,)))
        parts.append("threshold %.17g" % self.threshold)

        def emit(name, arr):
            arr = np.asarray(arr, dtype=float)
            parts.append(f"{name} " + " ".join(str(d) for d in arr.shape))
            parts.append(" ".join("%.17g" % v for v in arr.reshape(-1)))

        emit("mean", self.mean)
        emit("std", self.std)
        for i, (w, b) in enumerate(zip(self.weights, self.biases), start=1):
            emit(f"W{i}", w)
            emit(f"b{i}", b)
        return "\n".join(parts) + "\n"

    def save(self, path: str):
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path: str) -> "PruningNet":
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh]
        if not lines or lines[0] != cls.FORMAT:
            raise ValueError(f"not a {cls.FORMAT} file: {path}")
        idx = 1
        meta = {}
        arrays = {}
        while idx < len(lines):
            head = lines[idx].split()
            if not head:
                idx += 1
                continue
            name = head[0]
            if name == "layers":
                meta["layers"] = tuple(int(v) for v in head[1:])
                idx += 1
            elif name == "threshold":
                meta["threshold"] = float(head[1])
                idx += 1
            else:
                shape = tuple(int(v) for v in head[1:])
                text = lines[idx + 1].split()
                vals = np.array(text, dtype=float) if text else np.empty(0)
                arrays[name] = vals.reshape(shape)
                idx += 2
        n_layers = len(HIDDEN) + 1
        weights = [arrays[f"W{i}"] for i in range(1, n_layers + 1)]
        biases = [arrays[f"b{i}"] for i in range(1, n_layers + 1)]
        return cls(weights, biases, arrays["mean"], arrays["std"],
                   meta.get("threshold", 0.5))


def make_policy(net: PruningNet):
    """Wrap a network as the per-node callable ``solve`` accepts."""

    def policy(features: np.ndarray) -> bool:
        return bool(net.predict(features[None])[0])

    return policy


# ---------------------------------------------------------------------------
# traces and corpora


_TRACE_HEADER = ",".join(FEATURE_NAMES + ("label",))


def save_trace(path: str, trace: np.ndarray):
    """Write one solve's node trace as CSV (features + baseline label)."""
    trace = np.asarray(trace, dtype=float).reshape(-1, N_FEATURES + 1)
    with open(path, "w") as fh:
        fh.write(_TRACE_HEADER + "\n")
        for row in trace:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def load_trace(path: str) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != _TRACE_HEADER:
            raise ValueError(f"unexpected trace header in {path}")
        rows = [np.array(ln.split(","), dtype=float) for ln in fh if ln.strip()]
    if not rows:
        return np.empty((0, N_FEATURES + 1))
    return np.vstack(rows)


@dataclass
class TrainingCorpus:
    """Node traces grouped into training rounds.

    Round order matters: the first round trains a fresh network, later rounds
    fine-tune it at a reduced learning rate.  Labels are baseline prune
    decisions in every round.
    """

    rounds: list = field(default_factory=list)

    def add_round(self, traces) -> np.ndarray:
        block = np.vstack([np.asarray(t, dtype=float).reshape(-1, N_FEATURES + 1)
                           for t in traces])
        self.rounds.append(block)
        return block

    def all_rows(self) -> np.ndarray:
        if not self.rounds:
            return np.empty((0, N_FEATURES + 1))
        return np.vstack(self.rounds)

    def save(self, directory: str):
        os.makedirs(directory, exist_ok=True)
        for i, block in enumerate(self.rounds):
            save_trace(os.path.join(directory, f"round-{i}.csv"), block)

    @classmethod
    def load(cls, directory: str) -> "TrainingCorpus":
        rounds = []
        i = 0
        while True:
            path = os.path.join(directory, f"round-{i}.csv")
            if not os.path.exists(path):
                break
            rounds.append(load_trace(path))
            i += 1
        if not rounds:
            raise FileNotFoundError(f"no round-*.csv traces under {directory}")
        return cls(rounds=rounds)


def collect_training_data(problems, seed: int = 0, limits: SolveLimits | None = None,
                          slack_grid_step_deg: float | None = None,
                          multistarts: int = 16, pgd_iters: int = 500):
    """Baseline solves with tracing on; returns (traces, reports).

    Instance i is solved with the child seed of stream "instance/train-i" so
    the whole collection is reproducible from one master seed.
    """
    traces = []
    reports = []
    for i, prob in enumerate(problems):
        rep = solve(
            prob,
            seed=child_seed(seed, f"instance/train-{i}"),
            limits=limits,
            slack_grid_step_deg=slack_grid_step_deg,
            collect_trace=True,
            multistarts=multistarts,
            pgd_iters=pgd_iters,
        )
        if rep.trace is None or rep.trace.shape[0] == 0:
            raise ValueError(f"instance {i} produced an empty node trace")
        traces.append(rep.trace)
        reports.append(rep)
    return traces, reports


# ---------------------------------------------------------------------------
# training


def _holdout_split(block, frac=0.1):
    n = block.shape[0]
    k = max(int(round(n * frac)), 1) if n > 1 else 0
    return block[: n - k], block[n - k:]


def train_policy(corpus: TrainingCorpus, seed: int = 0, epochs: int = 50,
                 batch_size: int = 128, lr_first: float = 1e-3,
                 lr_later: float = 1e-4, momentum: float = 0.9):
    """Train a pruning network on baseline traces, one stage per round.

    The first round starts from a fresh He initialization; each later round
    fine-tunes the same parameters at ``lr_later``.  The loss is
    class-weighted binary cross-entropy with inverse-frequency weights
    computed over the whole corpus.  The last tenth of every round's rows is
    held out; the returned stats carry per-round holdout accuracy next to the
    majority-class floor for reference.
    """
    if not corpus.rounds or corpus.all_rows().shape[0] == 0:
        raise ValueError("empty training corpus")
    net = PruningNet.initialize(seed)
    rows_all = corpus.all_rows()
    net.set_normalization(rows_all)

    labels_all = rows_all[:, -1]
    n_classes = np.unique(labels_all > 0.5).size
    if n_classes < 2:
        only = "prune" if labels_all[0] > 0.5 else "expand"
        raise ValueError(
            f"degenerate corpus: all {labels_all.size} labels are '{only}'; "
            "training needs both prune and expand examples"
        )
    n_pos = max(labels_all.sum(), 1.0)
    n_neg = max((1.0 - labels_all).sum(), 1.0)
    w_pos = labels_all.size / (2.0 * n_pos)
    w_neg = labels_all.size / (2.0 * n_neg)

    rng = child_rng(seed, "net-batches")
    vel_w = [np.zeros_like(w) for w in net.weights]
    vel_b = [np.zeros_like(b) for b in net.biases]
    stats = {"rounds": []}

    for r, block in enumerate(corpus.rounds):
        train_rows, hold_rows = _holdout_split(block)
        z = net.normalize(train_rows[:, :N_FEATURES])
        y = train_rows[:, -1]
        sw = np.where(y > 0.5, w_pos, w_neg)
        lr = lr_first if r == 0 else lr_later
        n = z.shape[0]
        for _epoch in range(epochs):
            order = rng.permutation(n)
            for lo in range(0, n, batch_size):
                sel = order[lo: lo + batch_size]
                _sgd_step(net, z[sel], y[sel], sw[sel], lr, momentum, vel_w, vel_b)
        entry = {"round": r, "train_rows": int(n), "holdout_rows": int(hold_rows.shape[0])}
        if hold_rows.shape[0]:
            pred = net.predict(hold_rows[:, :N_FEATURES])
            truth = hold_rows[:, -1] > 0.5
            entry["holdout_accuracy"] = float((pred == truth).mean())
            entry["holdout_floor"] = float(max(truth.mean(), 1.0 - truth.mean()))
        stats["rounds"].append(entry)
    return net, stats


def _sgd_step(net, z, y, sample_w, lr, momentum, vel_w, vel_b):
    logits, cache = net._forward(z)
    p = _sigmoid(logits)
    # d loss / d logit of the weighted cross-entropy, averaged over the batch
    g_out = (sample_w * (p - y) / z.shape[0])[:, None]
    grads_w = []
    grads_b = []
    delta = g_out
    for layer in range(len(net.weights) - 1, -1, -1):
        h_in = cache[layer]
        grads_w.append(h_in.T @ delta)
        grads_b.append(delta.sum(axis=0))
        if layer > 0:
            delta = (delta @ net.weights[layer].T) * (cache[layer] > 0.0)
    grads_w.reverse()
    grads_b.reverse()
    for i in range(len(net.weights)):
        vel_w[i] *= momentum
        vel_w[i] -= lr * grads_w[i]
        net.weights[i] += vel_w[i]
        vel_b[i] *= momentum
        vel_b[i] -= lr * grads_b[i]
        net.biases[i] += vel_b[i]


def speed_metric(baseline_nodes, learned_nodes) -> float:
    """Mean per-instance node-count ratio (baseline / learned)."""
    base = np.asarray(baseline_nodes, dtype=float)
    learned = np.asarray(learned_nodes, dtype=float)
    if base.shape != learned.shape or base.size == 0:
        raise ValueError("node count lists must be equal-length and non-empty")
    return float((base / np.maximum(learned, 1.0)).mean())
