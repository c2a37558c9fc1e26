"""Intrinsic curiosity: forward-model prediction error in a learned
feature space as an exploration bonus.

Three jointly trained pieces: a feature encoder phi, a forward model
predicting phi(s') from (phi(s), a), and an inverse model predicting the
action from (phi(s), phi(s')).  The encoder is trained through the
inverse loss only; the forward model trains on its own loss against
detached features, which keeps the encoder from collapsing to satisfy the
forward model.
"""

from __future__ import annotations

import numpy as np

from ..kernel import Continuous, Discrete
from .network import MLP, Adam, NonFiniteLoss


class ICM:
    def __init__(self, obs_size: int, action_spec: Discrete | Continuous,
                 feature_dim: int = 32, eta: float = 0.01, beta: float = 0.2,
                 lr: float = 3e-4, hidden: int = 64,
                 rng: np.random.Generator | None = None, dtype=np.float32):
        rng = rng or np.random.default_rng(0)
        self.action_spec = action_spec
        self.eta = eta
        self.beta = beta
        self.dtype = dtype
        if isinstance(action_spec, Discrete):
            self.action_size = sum(action_spec.branches)  # one-hot blocks
        else:
            self.action_size = action_spec.dim
        self.encoder = MLP((obs_size, hidden, feature_dim), rng=rng,
                           dtype=dtype)
        self.forward_model = MLP((feature_dim + self.action_size, hidden,
                                  feature_dim), rng=rng, dtype=dtype)
        inverse_out = (sum(action_spec.branches)
                       if isinstance(action_spec, Discrete)
                       else action_spec.dim)
        self.inverse_model = MLP((2 * feature_dim, hidden, inverse_out),
                                 rng=rng, dtype=dtype)
        self.opt_enc = Adam(self.encoder.n_params, lr=lr, dtype=dtype)
        self.opt_fwd = Adam(self.forward_model.n_params, lr=lr, dtype=dtype)
        self.opt_inv = Adam(self.inverse_model.n_params, lr=lr, dtype=dtype)

    def _encode_action(self, actions: np.ndarray) -> np.ndarray:
        if isinstance(self.action_spec, Continuous):
            return np.asarray(actions, dtype=self.dtype)
        n = len(actions)
        out = np.zeros((n, self.action_size), dtype=self.dtype)
        offset = 0
        for i, b in enumerate(self.action_spec.branches):
            out[np.arange(n), offset + np.asarray(actions)[:, i]] = 1.0
            offset += b
        return out

    def intrinsic_reward(self, obs, next_obs, actions) -> np.ndarray:
        """r_i = (eta / 2) * ||phi(s') - predicted phi(s')||^2 per sample."""
        phi_s, _ = self.encoder.forward(obs)
        phi_n, _ = self.encoder.forward(next_obs)
        pred, _ = self.forward_model.forward(
            np.concatenate([phi_s, self._encode_action(actions)], axis=1))
        err = phi_n - pred
        return (self.eta / 2.0) * (err * err).sum(axis=1)

    def update(self, obs, next_obs, actions) -> dict:
        """One joint step; loss = beta * forward + (1 - beta) * inverse."""
        n = len(obs)
        phi_s, cache_s = self.encoder.forward(obs)
        phi_n, cache_n = self.encoder.forward(next_obs)
        a_enc = self._encode_action(actions)

        # forward model on detached features
        fwd_in = np.concatenate([phi_s, a_enc], axis=1)
        pred, cache_f = self.forward_model.forward(fwd_in)
        err = pred - phi_n
        forward_loss = 0.5 * float((err * err).sum(axis=1).mean())
        g_fwd, _ = self.forward_model.backward(
            cache_f, self.beta * err / n)

        # inverse model; gradients flow into the encoder
        inv_in = np.concatenate([phi_s, phi_n], axis=1)
        out, cache_i = self.inverse_model.forward(inv_in)
        if isinstance(self.action_spec, Discrete):
            d_out = np.zeros_like(out)
            inverse_loss = 0.0
            offset = 0
            for i, b in enumerate(self.action_spec.branches):
                lg = out[:, offset:offset + b]
                lg = lg - lg.max(axis=1, keepdims=True)
                logp = lg - np.log(np.exp(lg).sum(axis=1, keepdims=True))
                p = np.exp(logp)
                idx = np.asarray(actions)[:, i]
                inverse_loss -= float(logp[np.arange(n), idx].mean())
                onehot = np.zeros_like(p)
                onehot[np.arange(n), idx] = 1.0
                d_out[:, offset:offset + b] = (p - onehot) / n
                offset += b
        else:
            diff = out - a_enc
            inverse_loss = 0.5 * float((diff * diff).sum(axis=1).mean())
            d_out = diff / n
        g_inv, d_inv_in = self.inverse_model.backward(
            cache_i, (1.0 - self.beta) * d_out)

        feat = phi_s.shape[1]
        g_enc_s, _ = self.encoder.backward(cache_s, d_inv_in[:, :feat])
        g_enc_n, _ = self.encoder.backward(cache_n, d_inv_in[:, feat:])

        loss = self.beta * forward_loss + (1.0 - self.beta) * inverse_loss
        if not np.isfinite(loss):
            raise NonFiniteLoss(f"icm loss {loss}")
        self.opt_fwd.step(self.forward_model.params, g_fwd)
        self.opt_inv.step(self.inverse_model.params, g_inv)
        self.opt_enc.step(self.encoder.params, g_enc_s + g_enc_n)
        return {"loss": loss, "forward_loss": forward_loss,
                "inverse_loss": inverse_loss}
