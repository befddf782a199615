"""Shared agent machinery: transitions, replay, categorical policy math."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..env import N_ACTIONS, N_LEVELS


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    done: bool


class ReplayBuffer:
    """Bounded FIFO of transitions with a uniform sampler."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._storage: list[Transition] = []
        self._cursor = 0

    def __len__(self) -> int:
        return len(self._storage)

    def push(self, transition: Transition) -> None:
        if len(self._storage) < self.capacity:
            self._storage.append(transition)
        else:
            self._storage[self._cursor] = transition
            self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, batch_size: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
        if batch_size > len(self._storage):
            raise ValueError(f"cannot sample {batch_size} from buffer of {len(self._storage)}")
        idx = rng.integers(0, len(self._storage), size=batch_size)
        batch = [self._storage[i] for i in idx]
        return stack_transitions(batch)


def stack_transitions(transitions: list[Transition]) -> dict[str, np.ndarray]:
    return {
        "states": np.stack([t.state for t in transitions]).astype(np.float64),
        "actions": np.stack([t.action for t in transitions]),
        "rewards": np.array([t.reward for t in transitions], dtype=np.float64),
        "next_states": np.stack([t.next_state for t in transitions]).astype(np.float64),
        "dones": np.array([t.done for t in transitions], dtype=np.float64),
    }


def discounted_returns(rewards: np.ndarray, gamma: float, bootstrap: float = 0.0) -> np.ndarray:
    """Suffix sums of discounted rewards, seeded with a bootstrap value."""
    out = np.empty(len(rewards))
    acc = bootstrap
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out


def categorical_stats(logits: np.ndarray):
    """Per-dimension softmax statistics for a (batch, 28) logit array.

    Returns ``(probs, log_probs, entropy_per_dim)`` shaped
    (batch, 7, 4), (batch, 7, 4) and (batch, 7).
    """
    z = logits.reshape(-1, N_ACTIONS, N_LEVELS)
    z_shift = z - z.max(axis=-1, keepdims=True)
    ez = np.exp(z_shift)
    norm = ez.sum(axis=-1, keepdims=True)
    probs = ez / norm
    log_probs = z_shift - np.log(norm)
    entropy = -(probs * log_probs).sum(axis=-1)
    return probs, log_probs, entropy


def action_log_prob(log_probs: np.ndarray, actions: np.ndarray) -> np.ndarray:
    """Joint log-probability of the 7 chosen levels, per sample."""
    b = np.arange(log_probs.shape[0])[:, None]
    d = np.arange(N_ACTIONS)[None, :]
    return log_probs[b, d, actions].sum(axis=-1)


def policy_logit_grad(
    probs: np.ndarray,
    log_probs: np.ndarray,
    entropy: np.ndarray,
    actions: np.ndarray,
    coef_logp: np.ndarray,
    coef_entropy: float,
) -> np.ndarray:
    """d(loss)/d(logits) for a loss of the form
    sum_b coef_logp[b] * log pi(a_b | s_b) + coef_entropy * sum_b H_b.
    """
    onehot = np.eye(N_LEVELS)[actions]
    dz = coef_logp[:, None, None] * (onehot - probs)
    dz += coef_entropy * (-(probs * (log_probs + entropy[..., None])))
    return dz.reshape(dz.shape[0], N_ACTIONS * N_LEVELS)


def sample_levels(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw one level per dimension by inverse CDF; 7 uniforms per call."""
    cdf = np.cumsum(probs, axis=-1)
    u = rng.random(N_ACTIONS)
    return (u[:, None] < cdf).argmax(axis=-1).astype(np.int64)


def greedy_levels(logits: np.ndarray) -> np.ndarray:
    """Per-dimension argmax with lowest-index tie-break."""
    return logits.reshape(N_ACTIONS, N_LEVELS).argmax(axis=-1).astype(np.int64)


class RandomAgent:
    """Uniform-random level policy; learning disabled.  Baseline oracle."""

    action_kind = "levels"

    def __init__(self, seed_seq):
        self._rng = np.random.default_rng(seed_seq)

    def act(self, state, greedy: bool = False) -> np.ndarray:
        return self._rng.integers(0, N_LEVELS, size=N_ACTIONS)

    def train_episode(self, env) -> float:
        obs, _ = env.reset()
        total = 0.0
        done = False
        while not done:
            outcome = env.step(self.act(obs.as_array()))
            total += outcome.reward
            obs = outcome.observation
            done = outcome.done
        return total

    def params(self) -> dict:
        return {}

    def load(self, params: dict) -> None:
        if params:
            raise ValueError("random agent has no parameters to load")
