"""Exact activation functions and a seeded convergence lab.

The point of the lab is a fair comparison: both activations train the same
network from the same initial weights on the same synthetic regression task,
so the only difference between the two loss curves is the nonlinearity.
GELU is computed through the error function, not a tanh or sigmoid
approximation, and its derivative is the closed form Phi(x) + x phi(x).
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import erf as _erf

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

OPTIMIZERS = ("sgd", "adam")
ACTIVATION_KINDS = ("relu", "gelu")


def _checked(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: input must be finite")
    return arr


def _like_input(x, out: np.ndarray):
    if np.isscalar(x) or getattr(x, "ndim", None) == 0:
        return float(out)
    return out


def relu(x):
    """max(0, x), elementwise."""
    arr = _checked(x, "relu")
    return _like_input(x, np.maximum(arr, 0.0))


def relu_grad(x):
    """Subgradient of relu; the kink at 0 is assigned slope 0."""
    arr = _checked(x, "relu_grad")
    return _like_input(x, (arr > 0).astype(float))


def gauss_cdf(x):
    """Standard normal CDF via the error function."""
    arr = _checked(x, "gauss_cdf")
    return _like_input(x, 0.5 * (1.0 + _erf(arr / _SQRT2)))


def gelu(x):
    """x * Phi(x) with Phi the exact standard normal CDF."""
    arr = _checked(x, "gelu")
    return _like_input(x, arr * 0.5 * (1.0 + _erf(arr / _SQRT2)))


def gelu_grad(x):
    """d/dx [x Phi(x)] = Phi(x) + x phi(x)."""
    arr = _checked(x, "gelu_grad")
    phi = _INV_SQRT_2PI * np.exp(-0.5 * arr * arr)
    cdf = 0.5 * (1.0 + _erf(arr / _SQRT2))
    return _like_input(x, cdf + arr * phi)


ACTIVATIONS = {
    "relu": (relu, relu_grad),
    "gelu": (gelu, gelu_grad),
}


@dataclass(frozen=True)
class ConvergenceConfig:
    seed: int = 0
    hidden_sizes: tuple = (16,)
    learning_rate: float = 0.05
    epochs: int = 200
    loss_threshold: float = 0.05
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.loss_threshold <= 0:
            raise ValueError("loss_threshold must be positive")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            raise ValueError("hidden_sizes must be a non-empty tuple of positive ints")
        for name, b in (("beta1", self.beta1), ("beta2", self.beta2)):
            if not 0.0 <= b < 1.0:
                raise ValueError(f"{name} must lie in [0, 1)")


@dataclass
class ActivationRun:
    """One activation's training trace."""

    kind: str
    losses: list
    epochs_to_threshold: Optional[int]
    diverged: bool = False
    diverged_epoch: Optional[int] = None


@dataclass
class ConvergenceReport:
    config: ConvergenceConfig
    runs: dict = field(default_factory=dict)


N_SAMPLES = 128
IN_DIM = 2


def make_dataset(rng: np.random.Generator):
    """Fixed smooth 2-d regression target; identical for every activation."""
    X = rng.uniform(-2.0, 2.0, size=(N_SAMPLES, IN_DIM))
    y = (np.sin(2.0 * X[:, :1]) * np.cos(X[:, 1:2])) + 0.3 * X[:, :1] * X[:, 1:2]
    return X, y


def init_params(sizes, rng: np.random.Generator):
    """Scaled normal weights, zero biases, one (W, b) pair per layer."""
    params = []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        W = rng.normal(0.0, math.sqrt(1.0 / fan_in), size=(fan_in, fan_out))
        b = np.zeros((1, fan_out))
        params.append((W, b))
    return params


def forward(params, X: np.ndarray, kind: str):
    """Return (pre-activations, post-activations, output); output layer is linear."""
    act, _ = ACTIVATIONS[kind]
    zs, activations = [], [X]
    a = X
    for i, (W, b) in enumerate(params):
        z = a @ W + b
        zs.append(z)
        a = z if i == len(params) - 1 else act(z)
        activations.append(a)
    return zs, activations, a


def loss_and_grads(params, X: np.ndarray, y: np.ndarray, kind: str):
    """Mean squared error and its exact gradients via backprop."""
    _, grad_fn = ACTIVATIONS[kind]
    zs, activations, out = forward(params, X, kind)
    diff = out - y
    loss = float(np.mean(diff * diff))
    delta = 2.0 * diff / diff.size
    grads = [None] * len(params)
    for i in range(len(params) - 1, -1, -1):
        grads[i] = (activations[i].T @ delta, delta.sum(axis=0, keepdims=True))
        if i > 0:
            delta = (delta @ params[i][0].T) * grad_fn(zs[i - 1])
    return loss, grads


class _Sgd:
    def __init__(self, lr: float):
        self.lr = lr

    def step(self, params, grads):
        return [(W - self.lr * dW, b - self.lr * db)
                for (W, b), (dW, db) in zip(params, grads)]


class _Adam:
    def __init__(self, lr: float, beta1: float, beta2: float, eps: float = 1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = None
        self.v = None

    def step(self, params, grads):
        if self.m is None:
            self.m = [(np.zeros_like(W), np.zeros_like(b)) for W, b in params]
            self.v = [(np.zeros_like(W), np.zeros_like(b)) for W, b in params]
        self.t += 1
        out = []
        for i, ((W, b), (dW, db)) in enumerate(zip(params, grads)):
            mW, mb = self.m[i]
            vW, vb = self.v[i]
            mW = self.b1 * mW + (1 - self.b1) * dW
            mb = self.b1 * mb + (1 - self.b1) * db
            vW = self.b2 * vW + (1 - self.b2) * dW * dW
            vb = self.b2 * vb + (1 - self.b2) * db * db
            self.m[i] = (mW, mb)
            self.v[i] = (vW, vb)
            c1 = 1 - self.b1**self.t
            c2 = 1 - self.b2**self.t
            W2 = W - self.lr * (mW / c1) / (np.sqrt(vW / c2) + self.eps)
            b2 = b - self.lr * (mb / c1) / (np.sqrt(vb / c2) + self.eps)
            out.append((W2, b2))
        return out


def _make_optimizer(config: ConvergenceConfig):
    if config.optimizer == "sgd":
        return _Sgd(config.learning_rate)
    return _Adam(config.learning_rate, config.beta1, config.beta2)


def run_convergence_lab(config: ConvergenceConfig = ConvergenceConfig()) -> ConvergenceReport:
    """Train the same seeded network once per activation and record loss curves.

    A run that goes non-finite is truncated and flagged diverged rather than
    raising, so an aggressive learning rate still yields a comparable report.
    """
    rng = np.random.default_rng(config.seed)
    X, y = make_dataset(rng)
    sizes = [IN_DIM, *config.hidden_sizes, 1]
    shared_init = init_params(sizes, rng)

    report = ConvergenceReport(config=config)
    for kind in ACTIVATION_KINDS:
        params = copy.deepcopy(shared_init)
        optimizer = _make_optimizer(config)
        losses: list[float] = []
        reached: Optional[int] = None
        diverged = False
        diverged_epoch: Optional[int] = None
        # Divergence is an expected outcome here, so float blow-ups must not
        # warn or raise: exploded weights make the activations reject their
        # own input, which counts as divergence too.
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            for epoch in range(1, config.epochs + 1):
                try:
                    loss, grads = loss_and_grads(params, X, y, kind)
                    finite = math.isfinite(loss)
                except ValueError:
                    finite = False
                if not finite:
                    diverged = True
                    diverged_epoch = epoch
                    break
                params = optimizer.step(params, grads)
                try:
                    post_loss, _ = loss_and_grads(params, X, y, kind)
                    finite = math.isfinite(post_loss)
                except ValueError:
                    finite = False
                if not finite:
                    diverged = True
                    diverged_epoch = epoch
                    break
                losses.append(post_loss)
                if reached is None and post_loss <= config.loss_threshold:
                    reached = epoch
        report.runs[kind] = ActivationRun(
            kind=kind,
            losses=losses,
            epochs_to_threshold=reached,
            diverged=diverged,
            diverged_epoch=diverged_epoch,
        )
    return report


def report_to_json(report: ConvergenceReport) -> dict:
    cfg = report.config
    return {
        "seed": cfg.seed,
        "config": {
            "seed": cfg.seed,
            "hidden_sizes": list(cfg.hidden_sizes),
            "learning_rate": cfg.learning_rate,
            "epochs": cfg.epochs,
            "loss_threshold": cfg.loss_threshold,
            "optimizer": cfg.optimizer,
            "beta1": cfg.beta1,
            "beta2": cfg.beta2,
        },
        "runs": {
            kind: {
                "losses": run.losses,
                "epochs_to_threshold": run.epochs_to_threshold,
                "diverged": run.diverged,
                "diverged_epoch": run.diverged_epoch,
            }
            for kind, run in report.runs.items()
        },
    }


def save_report(report: ConvergenceReport, path) -> None:
    """Serialize with a fixed layout so identical configs give identical bytes."""
    Path(path).write_text(json.dumps(report_to_json(report), indent=2) + "\n")


def format_summary(report: ConvergenceReport) -> str:
    lines = []
    for kind in ACTIVATION_KINDS:
        run = report.runs[kind]
        if run.diverged:
            state = f"diverged at epoch {run.diverged_epoch}"
        elif run.epochs_to_threshold is not None:
            state = (
                f"reached loss <= {report.config.loss_threshold} "
                f"at epoch {run.epochs_to_threshold}"
            )
        else:
            state = f"did not reach {report.config.loss_threshold} " \
                    f"in {report.config.epochs} epochs"
        final = f", final loss {run.losses[-1]:.6f}" if run.losses else ""
        lines.append(f"{kind:<5} {state}{final}")
    return "\n".join(lines)
