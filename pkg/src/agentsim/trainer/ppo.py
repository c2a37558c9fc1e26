"""PPO clipped-surrogate update over a flat-parameter policy/value net."""

from __future__ import annotations

import numpy as np

from .network import Adam, NonFiniteLoss, PolicyValueNet


def ppo_clip_loss(log_prob_new, log_prob_old, advantage,
                  clip_eps: float) -> np.ndarray:
    """Per-sample surrogate objective min(r*A, clip(r)*A), r=exp(new-old)."""
    ratio = np.exp(np.asarray(log_prob_new) - np.asarray(log_prob_old))
    clipped = np.clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps)
    return np.minimum(ratio * advantage, clipped * advantage)


def ppo_minibatch_update(net: PolicyValueNet, opt: Adam, obs, actions,
                         logp_old, advantages, returns, clip_eps: float,
                         value_coef: float, entropy_coef: float) -> dict:
    """One gradient step on a minibatch; returns loss diagnostics."""
    n = len(obs)
    cache = net.forward(obs)
    logp_new = net.log_prob(cache, actions)
    entropy = net.entropy(cache)
    value = cache["value"]

    ratio = np.exp(logp_new - logp_old)
    surrogate = ppo_clip_loss(logp_new, logp_old, advantages, clip_eps)
    # gradient flows through the unclipped ratio only where it is active
    active = np.where(advantages >= 0.0, ratio < 1.0 + clip_eps,
                      ratio > 1.0 - clip_eps)
    value_err = value - returns

    policy_loss = -float(surrogate.mean())
    value_loss = float((value_err ** 2).mean())
    entropy_mean = float(entropy.mean())
    loss = (policy_loss + value_coef * value_loss
            - entropy_coef * entropy_mean)
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"ppo loss {loss}")

    c_logp = (-(active * ratio * advantages) / n).astype(net.dtype)
    c_ent = np.full(n, -entropy_coef / n, dtype=net.dtype)
    d_value = (2.0 * value_coef * value_err / n).astype(net.dtype)
    grad = net.backward(cache, actions, c_logp, c_ent, d_value)
    opt.step(net.params, grad)
    return {"loss": loss, "policy_loss": policy_loss,
            "value_loss": value_loss, "entropy": entropy_mean}


def normalize_advantages(adv: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    adv = np.asarray(adv, dtype=np.float32)
    return (adv - adv.mean()) / (adv.std() + eps)
