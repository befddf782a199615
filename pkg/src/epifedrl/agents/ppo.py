"""Proximal policy optimization with a clipped surrogate objective.

Collects one episode per rollout, stores behavior log-probabilities, then
runs several epochs of clipped-surrogate updates on the whole batch with
per-batch advantage normalization.
"""

from __future__ import annotations

import numpy as np

from ..config import AgentConfig
from ..env import N_ACTIONS, N_LEVELS
from ..nn import Adam, MlpSpec, ParamVector, backward, forward, forward_cached, init_params
from .base import (
    action_log_prob,
    categorical_stats,
    discounted_returns,
    greedy_levels,
    policy_logit_grad,
    sample_levels,
)

OBS_DIM = 4


def clipped_surrogate(ratio: np.ndarray, advantage: np.ndarray, clip: float) -> np.ndarray:
    """min(r * A, clip(r, 1-eps, 1+eps) * A), elementwise."""
    return np.minimum(ratio * advantage, np.clip(ratio, 1.0 - clip, 1.0 + clip) * advantage)


def ppo_loss_and_grads(
    policy_spec: MlpSpec,
    policy_params: ParamVector,
    value_spec: MlpSpec,
    value_params: ParamVector,
    states: np.ndarray,
    actions: np.ndarray,
    old_log_probs: np.ndarray,
    advantages: np.ndarray,
    returns: np.ndarray,
    clip: float,
    value_coef: float,
    entropy_coef: float,
):
    """Clipped-surrogate loss plus value loss and entropy bonus, with grads."""
    n = len(states)
    logits, cache_p = forward_cached(policy_spec, policy_params, states)
    probs, log_probs, entropy = categorical_stats(logits)
    logp = action_log_prob(log_probs, actions)
    ratio = np.exp(logp - old_log_probs)
    surr1 = ratio * advantages
    surr2 = np.clip(ratio, 1.0 - clip, 1.0 + clip) * advantages
    objective = np.minimum(surr1, surr2)
    entropy_total = entropy.sum(axis=-1)
    policy_loss = -float(np.mean(objective)) - entropy_coef * float(np.mean(entropy_total))
    # where the unclipped branch is active d(objective)/d(logp) = A * r, else 0
    active = (surr1 <= surr2).astype(np.float64)
    dlogp = -(advantages * ratio * active) / n
    dlogits = policy_logit_grad(probs, log_probs, entropy, actions, dlogp, -entropy_coef / n)
    policy_grad, _ = backward(policy_spec, policy_params, cache_p, dlogits)

    values, cache_v = forward_cached(value_spec, value_params, states)
    values = values[:, 0]
    value_loss = value_coef * float(np.mean((values - returns) ** 2))
    dvalues = (value_coef * 2.0 * (values - returns) / n)[:, None]
    value_grad, _ = backward(value_spec, value_params, cache_v, dvalues)

    diagnostics = {
        "policy_loss": policy_loss,
        "value_loss": value_loss,
        "clip_fraction": float(np.mean(1.0 - active)),
        "entropy": float(np.mean(entropy_total)),
    }
    return policy_loss + value_loss, policy_grad, value_grad, diagnostics


class PPOAgent:
    action_kind = "levels"

    def __init__(self, cfg: AgentConfig, seed_seq: np.random.SeedSequence):
        self.cfg = cfg
        self.policy_spec = MlpSpec((OBS_DIM, *cfg.hidden_dims, N_ACTIONS * N_LEVELS))
        self.value_spec = MlpSpec((OBS_DIM, *cfg.hidden_dims, 1))
        ss_init, ss_act = seed_seq.spawn(2)
        init_rng = np.random.default_rng(ss_init)
        self.policy_params = init_params(self.policy_spec, init_rng)
        self.value_params = init_params(self.value_spec, init_rng)
        self._act_rng = np.random.default_rng(ss_act)
        self.policy_opt = Adam(self.policy_spec.dims, lr=cfg.policy_lr)
        self.value_opt = Adam(self.value_spec.dims, lr=cfg.value_lr)

    def act(self, state: np.ndarray, greedy: bool = False) -> np.ndarray:
        logits = forward(self.policy_spec, self.policy_params, state)
        if greedy:
            return greedy_levels(logits)
        probs, _, _ = categorical_stats(logits[None, :])
        return sample_levels(probs[0], self._act_rng)

    def train_episode(self, env) -> float:
        obs, _ = env.reset()
        state = obs.as_array()
        states, actions, rewards, log_probs = [], [], [], []
        total = 0.0
        done = False
        last_done = False
        next_state = state
        while not done:
            logits = forward(self.policy_spec, self.policy_params, state)
            probs, lp_all, _ = categorical_stats(logits[None, :])
            action = sample_levels(probs[0], self._act_rng)
            logp = float(action_log_prob(lp_all, action[None, :])[0])
            outcome = env.step(action)
            next_state = outcome.observation.as_array()
            states.append(state)
            actions.append(action)
            rewards.append(outcome.reward)
            log_probs.append(logp)
            total += outcome.reward
            state = next_state
            done = outcome.done
            last_done = outcome.done
        rollout = {
            "states": np.stack(states),
            "actions": np.stack(actions),
            "rewards": np.array(rewards),
            "log_probs": np.array(log_probs),
            "last_next_state": next_state,
            "last_done": last_done,
        }
        self.update(rollout)
        return total

    def update(self, rollout: dict) -> dict:
        if len(rollout["states"]) == 0:
            raise ValueError("cannot update from an empty rollout")
        bootstrap = 0.0
        if not rollout["last_done"]:
            bootstrap = float(
                forward(self.value_spec, self.value_params, rollout["last_next_state"])[0]
            )
        returns = discounted_returns(rollout["rewards"], self.cfg.gamma, bootstrap)
        values = forward(self.value_spec, self.value_params, rollout["states"])[:, 0]
        advantages = returns - values
        advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)
        diagnostics: dict = {}
        for _ in range(self.cfg.ppo_epochs):
            _, policy_grad, value_grad, diagnostics = ppo_loss_and_grads(
                self.policy_spec,
                self.policy_params,
                self.value_spec,
                self.value_params,
                rollout["states"],
                rollout["actions"],
                rollout["log_probs"],
                advantages,
                returns,
                self.cfg.ppo_clip,
                self.cfg.value_coef,
                self.cfg.entropy_coef,
            )
            self.policy_opt.step(self.policy_params, policy_grad)
            self.value_opt.step(self.value_params, value_grad)
        return diagnostics

    def params(self) -> dict[str, ParamVector]:
        return {"policy": self.policy_params.copy(), "value": self.value_params.copy()}

    def load(self, params: dict[str, ParamVector]) -> None:
        self.policy_params = params["policy"].copy()
        self.value_params = params["value"].copy()
