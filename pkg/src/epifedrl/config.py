"""Configuration objects and JSON config ingestion.

Every tunable of the simulator lives in one of four dataclasses:

* :class:`EnvConfig` -- epidemiological and reward constants.
* :class:`AgentConfig` -- network sizes and RL hyperparameters.
* :class:`FedConfig` -- federation structure (clients, selection, rounds).
* :class:`RunConfig` -- the union: env + federation + agent + seed + outputs.

Configs are read from JSON.  Absent keys take defaults, unknown keys are
fatal, and validation errors name the offending key.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

ALGORITHMS = ("a2c", "ppo", "ddpg", "td3", "random")

#: Environment variable that overrides the output directory (and nothing else).
OUT_DIR_ENV_VAR = "EPIFEDRL_OUT_DIR"


class ConfigError(ValueError):
    """Raised for malformed or invalid configuration input."""


@dataclass(frozen=True)
class EnvConfig:
    """Constants of the epidemic decision environment.

    The mitigation coefficients scale how strongly each of the five
    transmission-reducing actions (travel restriction, lockdown, distance
    work, masks, vaccination) suppresses the transmission rate.
    """

    incubation_days: float = 14.0
    fatality_rate: float = 0.02
    population: int = 100_000
    initial_infected: float = 3.0
    density: float = 1000.0
    infection_threshold: float = 25.0
    death_threshold: float = 5.0
    reinfection_prob: float = 0.16
    vaccine_inefficacy: float = 0.61
    action_weights: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    horizon: int = 240
    mitigation_coeffs: tuple[float, ...] = (0.1, 1.0, 0.08, 0.06, 0.15)
    beta: float = 0.14
    density_ref: float = 1000.0
    incubation_scale: float = 28.0

    def validate(self) -> None:
        _require(self.incubation_days > 0, "env.incubation_days must be > 0")
        _require(0.0 <= self.fatality_rate <= 1.0, "env.fatality_rate must be in [0, 1]")
        _require(self.population > 0, "env.population must be > 0")
        _require(self.initial_infected >= 0, "env.initial_infected must be >= 0")
        _require(self.density > 0, "env.density must be > 0")
        _require(self.infection_threshold > 0, "env.infection_threshold must be > 0")
        _require(self.death_threshold > 0, "env.death_threshold must be > 0")
        _require(0.0 <= self.reinfection_prob <= 1.0, "env.reinfection_prob must be in [0, 1]")
        _require(0.0 <= self.vaccine_inefficacy <= 1.0, "env.vaccine_inefficacy must be in [0, 1]")
        _require(len(self.action_weights) == 7, "env.action_weights must have 7 entries")
        _require(all(w > 0 for w in self.action_weights), "env.action_weights must be positive")
        _require(self.horizon >= 1, "env.horizon must be >= 1")
        _require(len(self.mitigation_coeffs) == 5, "env.mitigation_coeffs must have 5 entries")
        _require(
            all(0.0 <= c <= 1.0 for c in self.mitigation_coeffs),
            "env.mitigation_coeffs must be in [0, 1]",
        )
        _require(self.beta > 0, "env.beta must be > 0")
        _require(self.density_ref > 0, "env.density_ref must be > 0")
        _require(self.incubation_scale > 0, "env.incubation_scale must be > 0")
        _require(
            self.incubation_days < self.incubation_scale,
            "env.incubation_days must be < env.incubation_scale",
        )


@dataclass(frozen=True)
class AgentConfig:
    """Hyperparameters shared by the four RL algorithms.

    Fields not used by a given algorithm are ignored by it (e.g. the replay
    settings are only read by the off-policy agents).
    """

    hidden_dims: tuple[int, ...] = (64, 64)
    gamma: float = 0.9
    # on-policy (a2c / ppo)
    policy_lr: float = 0.045
    value_lr: float = 0.05
    entropy_coef: float = 0.015
    normalize_advantages: bool = True
    ppo_clip: float = 0.2
    ppo_epochs: int = 4
    value_coef: float = 0.5
    # off-policy (ddpg / td3)
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    tau: float = 0.005
    policy_delay: int = 2
    exploration_noise: float = 0.1
    target_noise: float = 0.2
    target_noise_clip: float = 0.5
    replay_capacity: int = 100_000
    batch_size: int = 64

    def validate(self) -> None:
        _require(len(self.hidden_dims) >= 1, "agent.hidden_dims must not be empty")
        _require(all(d >= 1 for d in self.hidden_dims), "agent.hidden_dims must be >= 1")
        _require(0.0 <= self.gamma <= 1.0, "agent.gamma must be in [0, 1]")
        for name in ("policy_lr", "value_lr", "actor_lr", "critic_lr"):
            _require(getattr(self, name) > 0, f"agent.{name} must be > 0")
        _require(self.entropy_coef >= 0, "agent.entropy_coef must be >= 0")
        _require(0.0 < self.ppo_clip < 1.0, "agent.ppo_clip must be in (0, 1)")
        _require(self.ppo_epochs >= 1, "agent.ppo_epochs must be >= 1")
        _require(self.value_coef >= 0, "agent.value_coef must be >= 0")
        _require(0.0 < self.tau <= 1.0, "agent.tau must be in (0, 1]")
        _require(self.policy_delay >= 1, "agent.policy_delay must be >= 1")
        _require(self.exploration_noise >= 0, "agent.exploration_noise must be >= 0")
        _require(self.target_noise >= 0, "agent.target_noise must be >= 0")
        _require(self.target_noise_clip >= 0, "agent.target_noise_clip must be >= 0")
        _require(self.replay_capacity >= 1, "agent.replay_capacity must be >= 1")
        _require(self.batch_size >= 1, "agent.batch_size must be >= 1")
        _require(
            self.batch_size <= self.replay_capacity,
            "agent.batch_size must be <= agent.replay_capacity",
        )


@dataclass(frozen=True)
class FedConfig:
    """Federation structure: how many clients train and for how long."""

    n_clients: int = 10
    k_selected: int = 5
    local_epochs: int = 3
    global_epochs: int = 20
    #: optional per-client partial EnvConfig overrides (non-IID experiments);
    #: empty means every client runs the base EnvConfig with a distinct seed.
    client_env: tuple[dict, ...] = ()

    def validate(self) -> None:
        _require(self.n_clients >= 1, "federation.n_clients must be >= 1")
        _require(
            1 <= self.k_selected <= self.n_clients,
            "federation.k_selected must satisfy 1 <= k <= n_clients",
        )
        _require(self.local_epochs >= 0, "federation.local_epochs must be >= 0")
        _require(self.global_epochs >= 0, "federation.global_epochs must be >= 0")
        if self.client_env:
            _require(
                len(self.client_env) == self.n_clients,
                "federation.client_env must have one entry per client",
            )


@dataclass(frozen=True)
class RunConfig:
    """Everything a single experiment run needs."""

    seed: int = 0
    algorithm: str = "a2c"
    eval_episodes: int = 5
    out_dir: str | None = None
    env: EnvConfig = field(default_factory=EnvConfig)
    federation: FedConfig = field(default_factory=FedConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)

    def validate(self) -> None:
        _require(self.algorithm in ALGORITHMS, f"algorithm must be one of {ALGORITHMS}")
        _require(self.eval_episodes >= 1, "eval_episodes must be >= 1")
        self.env.validate()
        self.federation.validate()
        self.agent.validate()
        for i, overrides in enumerate(self.federation.client_env):
            client_env_config(self.env, overrides, index=i).validate()

    def client_env_config(self, client_id: int) -> EnvConfig:
        if not self.federation.client_env:
            return self.env
        return client_env_config(self.env, self.federation.client_env[client_id], client_id)


def client_env_config(base: EnvConfig, overrides: dict, index: int = 0) -> EnvConfig:
    """Apply a partial per-client override dict on top of the base EnvConfig."""
    known = {f.name for f in dataclasses.fields(EnvConfig)}
    for key in overrides:
        if key not in known:
            raise ConfigError(f"unknown key federation.client_env[{index}].{key}")
    coerced = {k: _coerce(EnvConfig, k, v) for k, v in overrides.items()}
    return dataclasses.replace(base, **coerced)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _coerce(cls, name: str, value):
    # JSON has no tuples; lists arriving for tuple-typed fields are converted.
    if isinstance(value, list):
        default = getattr(cls, name, None)
        if isinstance(default, tuple) or name in ("hidden_dims", "client_env"):
            return tuple(value)
    return value


def _dataclass_from_dict(cls, data: dict, prefix: str):
    known = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown key {prefix}{key}")
    kwargs = {k: _coerce(cls, k, v) for k, v in data.items()}
    return cls(**kwargs)


def run_config_from_dict(data: dict) -> RunConfig:
    """Build a validated RunConfig from a plain dict (parsed JSON)."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    known = {"seed", "algorithm", "eval_episodes", "out_dir", "env", "federation", "agent"}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown key {key}")
    cfg = RunConfig(
        seed=data.get("seed", 0),
        algorithm=data.get("algorithm", "a2c"),
        eval_episodes=data.get("eval_episodes", 5),
        out_dir=data.get("out_dir"),
        env=_dataclass_from_dict(EnvConfig, data.get("env", {}), "env."),
        federation=_dataclass_from_dict(FedConfig, data.get("federation", {}), "federation."),
        agent=_dataclass_from_dict(AgentConfig, data.get("agent", {}), "agent."),
    )
    cfg.validate()
    return cfg


def run_config_to_dict(cfg: RunConfig) -> dict:
    data = dataclasses.asdict(cfg)
    data["federation"]["client_env"] = [dict(d) for d in cfg.federation.client_env]
    return data


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON run configuration file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return run_config_from_dict(data)


def save_config(cfg: RunConfig, path: str | Path) -> None:
    """Write the effective configuration as canonical JSON."""
    Path(path).write_text(json.dumps(run_config_to_dict(cfg), indent=2, sort_keys=True) + "\n")


def resolve_out_dir(cfg: RunConfig, cli_out: str | None = None) -> Path:
    """Output directory precedence: env var > --out flag > config > ./runs."""
    env_override = os.environ.get(OUT_DIR_ENV_VAR)
    chosen = env_override or cli_out or cfg.out_dir or "runs"
    return Path(chosen)
