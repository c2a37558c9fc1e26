"""Small dense policy/value networks with hand-written reverse-mode
gradients over a flat parameter vector.

The algorithms (PPO, BC, ICM) express their losses through three
per-sample coefficients -- dL/dlogp, dL/dentropy, dL/dvalue -- and the
network turns those into exact parameter gradients.  Everything runs in
float32 by default; a float64 shadow mode backs the finite-difference
test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..kernel import Continuous, Discrete


class ShapeMismatch(Exception):
    pass


class NonFiniteLoss(Exception):
    pass


LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0


@dataclass(frozen=True)
class Topology:
    """Layer plan: input -> hidden stack -> (policy heads, value head)."""

    input_size: int
    hidden: tuple[int, ...] = (64, 64)
    activation: str = "tanh"
    action_spec: Discrete | Continuous = Discrete((2,))

    def __post_init__(self):
        if self.activation not in ("tanh", "relu"):
            raise ValueError(f"unknown activation {self.activation!r}")

    def describe(self) -> dict:
        if isinstance(self.action_spec, Discrete):
            action = {"type": "discrete",
                      "branches": list(self.action_spec.branches)}
        else:
            action = {"type": "continuous", "dim": self.action_spec.dim}
        return {"input_size": self.input_size, "hidden": list(self.hidden),
                "activation": self.activation, "action": action}

    @staticmethod
    def from_description(desc: dict) -> "Topology":
        action = desc["action"]
        spec = (Discrete(tuple(action["branches"]))
                if action["type"] == "discrete"
                else Continuous(action["dim"]))
        return Topology(desc["input_size"], tuple(desc["hidden"]),
                        desc["activation"], spec)


def _layer_sizes(topo: Topology) -> list[tuple[int, int]]:
    """(fan_in, fan_out) for trunk layers, then policy heads, value head."""
    sizes = []
    prev = topo.input_size
    for h in topo.hidden:
        sizes.append((prev, h))
        prev = h
    if isinstance(topo.action_spec, Discrete):
        for b in topo.action_spec.branches:
            sizes.append((prev, b))
    else:
        sizes.append((prev, topo.action_spec.dim))
    sizes.append((prev, 1))  # value head
    return sizes


def param_count(topo: Topology) -> int:
    n = sum(fi * fo + fo for fi, fo in _layer_sizes(topo))
    if isinstance(topo.action_spec, Continuous):
        n += topo.action_spec.dim  # state-independent log-std
    return n


def init_params(topo: Topology, rng: np.random.Generator,
                dtype=np.float32) -> np.ndarray:
    """Orthogonal-ish scaled normal init; value/policy heads get small
    weights so the initial policy is near uniform."""
    chunks = []
    trunk_n = len(topo.hidden)
    for i, (fi, fo) in enumerate(_layer_sizes(topo)):
        scale = math.sqrt(2.0 / fi) if i < trunk_n else 0.01
        chunks.append((rng.standard_normal((fi, fo)) * scale).ravel())
        chunks.append(np.zeros(fo))
    if isinstance(topo.action_spec, Continuous):
        chunks.append(np.zeros(topo.action_spec.dim))
    return np.concatenate(chunks).astype(dtype)


class PolicyValueNet:
    """Feed-forward trunk with categorical or Gaussian policy heads and a
    scalar value head, parameterized by one flat vector."""

    def __init__(self, topo: Topology, params: np.ndarray | None = None,
                 rng: np.random.Generator | None = None, dtype=np.float32):
        self.topo = topo
        self.dtype = dtype
        self.n_params = param_count(topo)
        if params is None:
            params = init_params(topo, rng or np.random.default_rng(0), dtype)
        if params.shape != (self.n_params,):
            raise ShapeMismatch(
                f"expected {self.n_params} params, got {params.shape}")
        self.params = np.asarray(params, dtype=dtype)
        self._views = self._slice_views()

    def _slice_views(self):
        views = []
        offset = 0
        for fi, fo in _layer_sizes(self.topo):
            w = self.params[offset:offset + fi * fo].reshape(fi, fo)
            offset += fi * fo
            b = self.params[offset:offset + fo]
            offset += fo
            views.append((w, b))
        if isinstance(self.topo.action_spec, Continuous):
            views.append(self.params[offset:])
        return views

    @property
    def discrete(self) -> bool:
        return isinstance(self.topo.action_spec, Discrete)

    def set_params(self, params: np.ndarray) -> None:
        self.params[:] = np.asarray(params, dtype=self.dtype)

    # -- forward ---------------------------------------------------------

    def forward(self, x: np.ndarray) -> dict:
        x = np.asarray(x, dtype=self.dtype)
        if x.ndim != 2 or x.shape[1] != self.topo.input_size:
            raise ShapeMismatch(
                f"input {x.shape} incompatible with input_size "
                f"{self.topo.input_size}")
        trunk_n = len(self.topo.hidden)
        hs = [x]
        for w, b in self._views[:trunk_n]:
            z = hs[-1] @ w + b
            hs.append(np.tanh(z) if self.topo.activation == "tanh"
                      else np.maximum(z, 0))
        top = hs[-1]
        cache = {"hs": hs}
        if self.discrete:
            branches = self.topo.action_spec.branches
            logits, logps = [], []
            for i in range(len(branches)):
                w, b = self._views[trunk_n + i]
                lg = top @ w + b
                lg = lg - lg.max(axis=1, keepdims=True)
                lse = np.log(np.exp(lg).sum(axis=1, keepdims=True))
                logits.append(lg)
                logps.append(lg - lse)
            cache["logits"] = logits
            cache["logps"] = logps
            vw, vb = self._views[trunk_n + len(branches)]
        else:
            w, b = self._views[trunk_n]
            cache["mean"] = top @ w + b
            cache["log_std"] = np.clip(self._views[-1], LOG_STD_MIN,
                                       LOG_STD_MAX).astype(self.dtype)
            vw, vb = self._views[trunk_n + 1]
        cache["value"] = (top @ vw + vb)[:, 0]
        return cache

    def sample(self, cache: dict, rng: np.random.Generator):
        """Sample actions; returns (actions, logp)."""
        n = cache["hs"][0].shape[0]
        if self.discrete:
            branches = self.topo.action_spec.branches
            actions = np.zeros((n, len(branches)), dtype=np.int64)
            for i, logp in enumerate(cache["logps"]):
                u = rng.random((n, 1))
                cdf = np.cumsum(np.exp(logp), axis=1)
                actions[:, i] = (u > cdf).sum(axis=1).clip(0, branches[i] - 1)
            return actions, self.log_prob(cache, actions)
        std = np.exp(cache["log_std"])
        noise = rng.standard_normal(cache["mean"].shape).astype(self.dtype)
        actions = np.clip(cache["mean"] + std * noise, -1.0, 1.0)
        return actions, self.log_prob(cache, actions)

    def greedy(self, cache: dict) -> np.ndarray:
        """Mode of the policy; discrete argmax ties go to the lowest index."""
        if self.discrete:
            return np.stack([lg.argmax(axis=1) for lg in cache["logits"]],
                            axis=1).astype(np.int64)
        return cache["mean"].copy()

    def log_prob(self, cache: dict, actions: np.ndarray) -> np.ndarray:
        if self.discrete:
            total = 0.0
            for i, logp in enumerate(cache["logps"]):
                total = total + logp[np.arange(len(actions)), actions[:, i]]
            return total
        mean, log_std = cache["mean"], cache["log_std"]
        z = (np.asarray(actions, dtype=self.dtype) - mean) / np.exp(log_std)
        return (-0.5 * z * z - log_std
                - 0.5 * math.log(2 * math.pi)).sum(axis=1)

    def entropy(self, cache: dict) -> np.ndarray:
        if self.discrete:
            total = 0.0
            for logp in cache["logps"]:
                p = np.exp(logp)
                total = total - (p * logp).sum(axis=1)
            return total
        return (cache["log_std"]
                + 0.5 * math.log(2 * math.pi * math.e)).sum() \
            * np.ones(cache["mean"].shape[0], dtype=self.dtype)

    # -- backward --------------------------------------------------------

    def backward(self, cache: dict, actions: np.ndarray,
                 c_logp: np.ndarray, c_ent: np.ndarray,
                 d_value: np.ndarray) -> np.ndarray:
        """Exact gradient of
        L = sum_i c_logp[i]*logp_i + c_ent[i]*H_i + d_value[i]*V_i
        with respect to the flat parameter vector."""
        trunk_n = len(self.topo.hidden)
        top = cache["hs"][-1]
        n = top.shape[0]
        grads = [None] * len(self._views)
        d_top = np.zeros_like(top)

        if self.discrete:
            branches = self.topo.action_spec.branches
            ent = None
            for i in range(len(branches)):
                logp = cache["logps"][i]
                p = np.exp(logp)
                onehot = np.zeros_like(p)
                onehot[np.arange(n), actions[:, i]] = 1.0
                d_logits = c_logp[:, None] * (onehot - p)
                h_i = -(p * logp).sum(axis=1, keepdims=True)
                d_logits += c_ent[:, None] * (-p * (logp + h_i))
                w, b = self._views[trunk_n + i]
                grads[trunk_n + i] = (top.T @ d_logits,
                                     d_logits.sum(axis=0))
                d_top += d_logits @ w.T
            v_idx = trunk_n + len(branches)
        else:
            mean, log_std = cache["mean"], cache["log_std"]
            std = np.exp(log_std)
            z = (np.asarray(actions, dtype=self.dtype) - mean) / std
            d_mean = c_logp[:, None] * (z / std)
            d_log_std = (c_logp[:, None] * (z * z - 1.0)
                         + c_ent[:, None]).sum(axis=0)
            raw = self._views[-1]
            inside = (raw >= LOG_STD_MIN) & (raw <= LOG_STD_MAX)
            d_log_std = np.where(inside, d_log_std, 0.0)
            w, b = self._views[trunk_n]
            grads[trunk_n] = (top.T @ d_mean, d_mean.sum(axis=0))
            d_top += d_mean @ w.T
            grads[-1] = d_log_std
            v_idx = trunk_n + 1

        vw, vb = self._views[v_idx]
        dv = np.asarray(d_value, dtype=self.dtype)[:, None]
        grads[v_idx] = (top.T @ dv, dv.sum(axis=0))
        d_top += dv @ vw.T

        d_h = d_top
        for li in range(trunk_n - 1, -1, -1):
            h_out = cache["hs"][li + 1]
            if self.topo.activation == "tanh":
                d_z = d_h * (1.0 - h_out * h_out)
            else:
                d_z = d_h * (h_out > 0)
            w, b = self._views[li]
            grads[li] = (cache["hs"][li].T @ d_z, d_z.sum(axis=0))
            d_h = d_z @ w.T

        flat = []
        for g in grads:
            if isinstance(g, tuple):
                flat.append(g[0].ravel())
                flat.append(g[1].ravel())
            elif g is not None:
                flat.append(np.asarray(g).ravel())
        return np.concatenate(flat).astype(self.dtype)


class MLP:
    """Generic flat-parameter MLP with linear output, used by the ICM.

    backward() returns both the parameter gradient and the input gradient
    so feature encoders can be trained through downstream models.
    """

    def __init__(self, sizes: tuple[int, ...],
                 params: np.ndarray | None = None,
                 rng: np.random.Generator | None = None, dtype=np.float32):
        self.sizes = tuple(sizes)
        self.dtype = dtype
        self.n_params = sum(sizes[i] * sizes[i + 1] + sizes[i + 1]
                            for i in range(len(sizes) - 1))
        if params is None:
            rng = rng or np.random.default_rng(0)
            chunks = []
            for i in range(len(sizes) - 1):
                scale = math.sqrt(2.0 / sizes[i])
                chunks.append((rng.standard_normal(
                    (sizes[i], sizes[i + 1])) * scale).ravel())
                chunks.append(np.zeros(sizes[i + 1]))
            params = np.concatenate(chunks)
        self.params = np.asarray(params, dtype=dtype)
        self._views = []
        offset = 0
        for i in range(len(sizes) - 1):
            fi, fo = sizes[i], sizes[i + 1]
            w = self.params[offset:offset + fi * fo].reshape(fi, fo)
            offset += fi * fo
            b = self.params[offset:offset + fo]
            offset += fo
            self._views.append((w, b))

    def forward(self, x: np.ndarray):
        x = np.asarray(x, dtype=self.dtype)
        hs = [x]
        for i, (w, b) in enumerate(self._views):
            z = hs[-1] @ w + b
            hs.append(np.tanh(z) if i < len(self._views) - 1 else z)
        return hs[-1], hs

    def backward(self, hs: list, d_out: np.ndarray):
        grads = []
        d_h = np.asarray(d_out, dtype=self.dtype)
        for i in range(len(self._views) - 1, -1, -1):
            if i < len(self._views) - 1:
                h_out = hs[i + 1]
                d_h = d_h * (1.0 - h_out * h_out)
            w, b = self._views[i]
            grads.append((hs[i].T @ d_h, d_h.sum(axis=0)))
            d_h = d_h @ w.T
        flat = []
        for gw, gb in reversed(grads):
            flat.append(gw.ravel())
            flat.append(gb.ravel())
        return np.concatenate(flat).astype(self.dtype), d_h


class Adam:
    """Adam on a flat parameter vector; state stays float32 so identical
    runs are bitwise reproducible."""

    def __init__(self, n_params: int, lr=3e-4, beta1=0.9, beta2=0.999,
                 eps=1e-8, dtype=np.float32):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = np.zeros(n_params, dtype=dtype)
        self.v = np.zeros(n_params, dtype=dtype)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        if not np.all(np.isfinite(grad)):
            raise NonFiniteLoss("non-finite gradient")
        self.t += 1
        self.m += (1 - self.beta1) * (grad - self.m)
        self.v += (1 - self.beta2) * (grad * grad - self.v)
        mhat = self.m / (1 - self.beta1 ** self.t)
        vhat = self.v / (1 - self.beta2 ** self.t)
        params -= (self.lr * mhat / (np.sqrt(vhat) + self.eps)).astype(
            params.dtype)
