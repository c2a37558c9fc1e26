"""Behavioral cloning: maximum-likelihood fit of the policy to expert
demonstration actions."""

from __future__ import annotations

import numpy as np

from .network import Adam, NonFiniteLoss, PolicyValueNet, ShapeMismatch


def bc_update(net: PolicyValueNet, opt: Adam, obs: np.ndarray,
              actions: np.ndarray) -> float:
    """One gradient step; returns the mean negative log-likelihood.

    Cross-entropy for discrete heads, Gaussian NLL for continuous ones.
    """
    n = len(obs)
    if n == 0:
        raise ShapeMismatch("empty demonstration batch")
    cache = net.forward(obs)
    logp = net.log_prob(cache, actions)
    loss = -float(logp.mean())
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"bc loss {loss}")
    c_logp = np.full(n, -1.0 / n, dtype=net.dtype)
    zeros = np.zeros(n, dtype=net.dtype)
    grad = net.backward(cache, np.asarray(actions), c_logp, zeros, zeros)
    opt.step(net.params, grad)
    return loss


def action_agreement(net: PolicyValueNet, obs: np.ndarray,
                     actions: np.ndarray) -> float:
    """Fraction of rows where the greedy policy matches every branch."""
    cache = net.forward(obs)
    greedy = net.greedy(cache)
    if net.discrete:
        return float((greedy == np.asarray(actions)).all(axis=1).mean())
    return float(np.allclose(greedy, actions, atol=0.1))
