"""Deep deterministic policy gradient over continuous intervention intensities.

The actor emits intensities in [0, 1]^7 through a sigmoid head; exploration
adds clipped Gaussian noise.  A critic learns Q from uniformly sampled
replay batches against a slowly tracking target pair.
"""

from __future__ import annotations

import numpy as np

from ..config import AgentConfig
from ..env import N_ACTIONS
from ..nn import Adam, MlpSpec, ParamVector, backward, forward, forward_cached, init_params
from .base import ReplayBuffer, Transition

OBS_DIM = 4


def critic_loss_and_grads(
    critic_spec: MlpSpec,
    critic_params: ParamVector,
    states: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
):
    """Squared Bellman error against fixed targets, with exact gradient."""
    n = len(states)
    x = np.hstack([states, actions])
    q, cache = forward_cached(critic_spec, critic_params, x)
    q = q[:, 0]
    loss = float(np.mean((q - targets) ** 2))
    dq = (2.0 * (q - targets) / n)[:, None]
    grad, _ = backward(critic_spec, critic_params, cache, dq)
    return loss, grad


def actor_loss_and_grads(
    actor_spec: MlpSpec,
    actor_params: ParamVector,
    critic_spec: MlpSpec,
    critic_params: ParamVector,
    states: np.ndarray,
):
    """Loss -mean Q(s, mu(s)); gradient flows through the critic's action input."""
    n = len(states)
    actions, cache_a = forward_cached(actor_spec, actor_params, states)
    x = np.hstack([states, actions])
    q, cache_q = forward_cached(critic_spec, critic_params, x)
    loss = -float(np.mean(q[:, 0]))
    dq = np.full((n, 1), -1.0 / n)
    _, dx = backward(critic_spec, critic_params, cache_q, dq)
    grad, _ = backward(actor_spec, actor_params, cache_a, dx[:, OBS_DIM:])
    return loss, grad


def soft_update(target: ParamVector, online: ParamVector, tau: float) -> None:
    target.values *= 1.0 - tau
    target.values += tau * online.values


class DDPGAgent:
    action_kind = "intensity"

    def __init__(self, cfg: AgentConfig, seed_seq: np.random.SeedSequence):
        self.cfg = cfg
        self.actor_spec = MlpSpec((OBS_DIM, *cfg.hidden_dims, N_ACTIONS), head="sigmoid")
        self.critic_spec = MlpSpec((OBS_DIM + N_ACTIONS, *cfg.hidden_dims, 1))
        ss_init, ss_act, ss_update = seed_seq.spawn(3)
        init_rng = np.random.default_rng(ss_init)
        self.actor_params = init_params(self.actor_spec, init_rng)
        self.critic_params = init_params(self.critic_spec, init_rng)
        self.actor_target = self.actor_params.copy()
        self.critic_target = self.critic_params.copy()
        self._act_rng = np.random.default_rng(ss_act)
        self._update_rng = np.random.default_rng(ss_update)
        self.actor_opt = Adam(self.actor_spec.dims, lr=cfg.actor_lr)
        self.critic_opt = Adam(self.critic_spec.dims, lr=cfg.critic_lr)
        self.buffer = ReplayBuffer(cfg.replay_capacity)

    def act(self, state: np.ndarray, greedy: bool = False) -> np.ndarray:
        action = forward(self.actor_spec, self.actor_params, state)
        if not greedy:
            noise = self._act_rng.normal(0.0, self.cfg.exploration_noise, size=N_ACTIONS)
            action = np.clip(action + noise, 0.0, 1.0)
        return action

    def train_episode(self, env) -> float:
        obs, _ = env.reset()
        state = obs.as_array()
        total = 0.0
        done = False
        while not done:
            action = self.act(state)
            outcome = env.step_intensity(action)
            next_state = outcome.observation.as_array()
            self.buffer.push(Transition(state, action, outcome.reward, next_state, outcome.done))
            if len(self.buffer) >= self.cfg.batch_size:
                self.update(self.buffer.sample(self.cfg.batch_size, self._update_rng))
            total += outcome.reward
            state = next_state
            done = outcome.done
        return total

    def _targets(self, batch: dict) -> np.ndarray:
        next_actions = forward(self.actor_spec, self.actor_target, batch["next_states"])
        x = np.hstack([batch["next_states"], next_actions])
        q_next = forward(self.critic_spec, self.critic_target, x)[:, 0]
        return batch["rewards"] + self.cfg.gamma * (1.0 - batch["dones"]) * q_next

    def update(self, batch: dict) -> dict:
        if len(batch["states"]) < self.cfg.batch_size:
            raise ValueError("batch smaller than configured minimum")
        targets = self._targets(batch)
        critic_loss, critic_grad = critic_loss_and_grads(
            self.critic_spec, self.critic_params, batch["states"], batch["actions"], targets
        )
        self.critic_opt.step(self.critic_params, critic_grad)
        actor_loss, actor_grad = actor_loss_and_grads(
            self.actor_spec,
            self.actor_params,
            self.critic_spec,
            self.critic_params,
            batch["states"],
        )
        self.actor_opt.step(self.actor_params, actor_grad)
        soft_update(self.actor_target, self.actor_params, self.cfg.tau)
        soft_update(self.critic_target, self.critic_params, self.cfg.tau)
        return {"critic_loss": critic_loss, "actor_loss": actor_loss}

    def params(self) -> dict[str, ParamVector]:
        return {"actor": self.actor_params.copy(), "critic": self.critic_params.copy()}

    def load(self, params: dict[str, ParamVector]) -> None:
        self.actor_params = params["actor"].copy()
        self.critic_params = params["critic"].copy()
