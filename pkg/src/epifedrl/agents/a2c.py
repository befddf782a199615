"""Synchronous advantage actor-critic over discrete intervention levels.

The policy head emits 7 independent 4-way categorical distributions; the
critic regresses discounted returns.  One rollout = one full episode, after
which both networks take a single optimizer step.
"""

from __future__ import annotations

import numpy as np

from ..config import AgentConfig
from ..env import N_ACTIONS, N_LEVELS
from ..nn import Adam, MlpSpec, ParamVector, backward, forward, forward_cached, init_params
from .base import (
    Transition,
    action_log_prob,
    categorical_stats,
    discounted_returns,
    greedy_levels,
    policy_logit_grad,
    sample_levels,
    stack_transitions,
)

OBS_DIM = 4


def a2c_loss_and_grads(
    policy_spec: MlpSpec,
    policy_params: ParamVector,
    value_spec: MlpSpec,
    value_params: ParamVector,
    states: np.ndarray,
    actions: np.ndarray,
    returns: np.ndarray,
    advantages: np.ndarray,
    entropy_coef: float,
):
    """Combined actor + critic loss with exact gradients.

    Advantages enter as fixed inputs (they are not differentiated through),
    so the gradient is exact for the loss as written.
    """
    n = len(states)
    logits, cache_p = forward_cached(policy_spec, policy_params, states)
    probs, log_probs, entropy = categorical_stats(logits)
    logp = action_log_prob(log_probs, actions)
    entropy_total = entropy.sum(axis=-1)
    policy_loss = -float(np.mean(advantages * logp)) - entropy_coef * float(
        np.mean(entropy_total)
    )
    dlogits = policy_logit_grad(
        probs, log_probs, entropy, actions, -advantages / n, -entropy_coef / n
    )
    policy_grad, _ = backward(policy_spec, policy_params, cache_p, dlogits)

    values, cache_v = forward_cached(value_spec, value_params, states)
    values = values[:, 0]
    value_loss = float(np.mean((values - returns) ** 2))
    dvalues = (2.0 * (values - returns) / n)[:, None]
    value_grad, _ = backward(value_spec, value_params, cache_v, dvalues)

    diagnostics = {
        "policy_loss": policy_loss,
        "value_loss": value_loss,
        "entropy": float(np.mean(entropy_total)),
    }
    return policy_loss + value_loss, policy_grad, value_grad, diagnostics


class A2CAgent:
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
        rollout: list[Transition] = []
        total = 0.0
        done = False
        while not done:
            action = self.act(state)
            outcome = env.step(action)
            next_state = outcome.observation.as_array()
            rollout.append(Transition(state, action, outcome.reward, next_state, outcome.done))
            total += outcome.reward
            state = next_state
            done = outcome.done
        self.update(rollout)
        return total

    def update(self, rollout: list[Transition]) -> dict:
        if not rollout:
            raise ValueError("cannot update from an empty rollout")
        batch = stack_transitions(rollout)
        bootstrap = 0.0
        if not rollout[-1].done:
            bootstrap = float(
                forward(self.value_spec, self.value_params, rollout[-1].next_state)[0]
            )
        returns = discounted_returns(batch["rewards"], self.cfg.gamma, bootstrap)
        values = forward(self.value_spec, self.value_params, batch["states"])[:, 0]
        advantages = returns - values
        if self.cfg.normalize_advantages:
            advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)
        _, policy_grad, value_grad, diagnostics = a2c_loss_and_grads(
            self.policy_spec,
            self.policy_params,
            self.value_spec,
            self.value_params,
            batch["states"],
            batch["actions"],
            returns,
            advantages,
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
