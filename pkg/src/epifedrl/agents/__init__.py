"""RL agents sharing a common act / train_episode / params / load surface."""

from __future__ import annotations

import numpy as np

from ..config import ALGORITHMS, AgentConfig
from .a2c import A2CAgent
from .base import RandomAgent, ReplayBuffer, Transition
from .ddpg import DDPGAgent
from .ppo import PPOAgent
from .td3 import TD3Agent

_REGISTRY = {
    "a2c": A2CAgent,
    "ppo": PPOAgent,
    "ddpg": DDPGAgent,
    "td3": TD3Agent,
}


def make_agent(algorithm: str, cfg: AgentConfig, seed_seq: np.random.SeedSequence):
    """Build an agent by algorithm tag with its own derived RNG streams."""
    if algorithm == "random":
        return RandomAgent(seed_seq)
    if algorithm not in _REGISTRY:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    return _REGISTRY[algorithm](cfg, seed_seq)


__all__ = [
    "A2CAgent",
    "PPOAgent",
    "DDPGAgent",
    "TD3Agent",
    "RandomAgent",
    "ReplayBuffer",
    "Transition",
    "make_agent",
]
