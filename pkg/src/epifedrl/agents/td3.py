"""Twin delayed deep deterministic policy gradient.

Extends the deterministic actor-critic with twin critics whose minimum
forms the Bellman target, clipped Gaussian smoothing of the target action,
and a delayed actor / target refresh every ``policy_delay`` updates.
"""

from __future__ import annotations

import numpy as np

from ..config import AgentConfig
from ..env import N_ACTIONS
from ..nn import Adam, MlpSpec, ParamVector, forward, init_params
from .base import ReplayBuffer, Transition
from .ddpg import OBS_DIM, actor_loss_and_grads, critic_loss_and_grads, soft_update


def smoothed_target_actions(
    actor_spec: MlpSpec,
    actor_target: ParamVector,
    next_states: np.ndarray,
    noise: np.ndarray,
) -> np.ndarray:
    """Target policy action plus pre-drawn clipped noise, clipped to [0, 1]."""
    base = forward(actor_spec, actor_target, next_states)
    return np.clip(base + noise, 0.0, 1.0)


class TD3Agent:
    action_kind = "intensity"

    def __init__(self, cfg: AgentConfig, seed_seq: np.random.SeedSequence):
        self.cfg = cfg
        self.actor_spec = MlpSpec((OBS_DIM, *cfg.hidden_dims, N_ACTIONS), head="sigmoid")
        self.critic_spec = MlpSpec((OBS_DIM + N_ACTIONS, *cfg.hidden_dims, 1))
        ss_init, ss_act, ss_update = seed_seq.spawn(3)
        init_rng = np.random.default_rng(ss_init)
        self.actor_params = init_params(self.actor_spec, init_rng)
        self.critic1_params = init_params(self.critic_spec, init_rng)
        self.critic2_params = init_params(self.critic_spec, init_rng)
        self.actor_target = self.actor_params.copy()
        self.critic1_target = self.critic1_params.copy()
        self.critic2_target = self.critic2_params.copy()
        self._act_rng = np.random.default_rng(ss_act)
        self._update_rng = np.random.default_rng(ss_update)
        self.actor_opt = Adam(self.actor_spec.dims, lr=cfg.actor_lr)
        self.critic1_opt = Adam(self.critic_spec.dims, lr=cfg.critic_lr)
        self.critic2_opt = Adam(self.critic_spec.dims, lr=cfg.critic_lr)
        self.buffer = ReplayBuffer(cfg.replay_capacity)
        self.update_count = 0

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

    def compute_targets(self, batch: dict, noise: np.ndarray) -> np.ndarray:
        """min of the twin target critics on the smoothed target action."""
        next_actions = smoothed_target_actions(
            self.actor_spec, self.actor_target, batch["next_states"], noise
        )
        x = np.hstack([batch["next_states"], next_actions])
        q1 = forward(self.critic_spec, self.critic1_target, x)[:, 0]
        q2 = forward(self.critic_spec, self.critic2_target, x)[:, 0]
        return batch["rewards"] + self.cfg.gamma * (1.0 - batch["dones"]) * np.minimum(q1, q2)

    def update(self, batch: dict) -> dict:
        if len(batch["states"]) < self.cfg.batch_size:
            raise ValueError("batch smaller than configured minimum")
        noise = np.clip(
            self._update_rng.normal(0.0, self.cfg.target_noise, size=batch["next_states"].shape[0:1] + (N_ACTIONS,)),
            -self.cfg.target_noise_clip,
            self.cfg.target_noise_clip,
        )
        targets = self.compute_targets(batch, noise)
        loss1, grad1 = critic_loss_and_grads(
            self.critic_spec, self.critic1_params, batch["states"], batch["actions"], targets
        )
        self.critic1_opt.step(self.critic1_params, grad1)
        loss2, grad2 = critic_loss_and_grads(
            self.critic_spec, self.critic2_params, batch["states"], batch["actions"], targets
        )
        self.critic2_opt.step(self.critic2_params, grad2)
        self.update_count += 1
        diagnostics = {"critic1_loss": loss1, "critic2_loss": loss2, "actor_loss": None}
        if self.update_count % self.cfg.policy_delay == 0:
            actor_loss, actor_grad = actor_loss_and_grads(
                self.actor_spec,
                self.actor_params,
                self.critic_spec,
                self.critic1_params,
                batch["states"],
            )
            self.actor_opt.step(self.actor_params, actor_grad)
            soft_update(self.actor_target, self.actor_params, self.cfg.tau)
            soft_update(self.critic1_target, self.critic1_params, self.cfg.tau)
            soft_update(self.critic2_target, self.critic2_params, self.cfg.tau)
            diagnostics["actor_loss"] = actor_loss
        return diagnostics

    def params(self) -> dict[str, ParamVector]:
        return {
            "actor": self.actor_params.copy(),
            "critic1": self.critic1_params.copy(),
            "critic2": self.critic2_params.copy(),
        }

    def load(self, params: dict[str, ParamVector]) -> None:
        self.actor_params = params["actor"].copy()
        self.critic1_params = params["critic1"].copy()
        self.critic2_params = params["critic2"].copy()
