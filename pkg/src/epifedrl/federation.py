"""Federated averaging of RL agents across independent simulated provinces.

Each round of the federated run: a random subset of clients receives the
global parameters, trains locally for a few episodes on its own
environment, and returns only its parameters.  The server averages the
returned vectors network-by-network into the new global model, which is
then evaluated on held-out seeds.  The centralized baseline trains one
agent continuously and is evaluated on the same round axis.

All randomness derives from one master seed so a run is reproducible
bit-for-bit.  Clients train sequentially in id order and aggregation
averages in id order, which keeps the reduction order fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .agents import make_agent
from .config import RunConfig
from .env import EpidemicEnv
from .metrics import RoundRecord
from .nn import ParamVector, average_params, save_param_set


@dataclass
class LocalTrainResult:
    """What crosses the client boundary: parameters and reward summaries only."""

    client_id: int
    params: dict[str, ParamVector]
    episode_rewards: list[float] = field(default_factory=list)


@dataclass
class GlobalModel:
    params: dict[str, ParamVector]
    round_index: int = 0


@dataclass
class ClientHandle:
    client_id: int
    env: EpidemicEnv
    agent: object


@dataclass
class RunArtifacts:
    records: list[RoundRecord]
    final_params: dict[str, ParamVector]
    algorithm: str


def derive_streams(cfg: RunConfig):
    """Spawn the fixed RNG tree for a run from the master seed."""
    root = np.random.SeedSequence(cfg.seed)
    selection_ss, init_ss, eval_ss, clients_ss = root.spawn(4)
    client_seeds = clients_ss.spawn(cfg.federation.n_clients)
    return selection_ss, init_ss, eval_ss, client_seeds


def make_clients(cfg: RunConfig, client_seeds) -> list[ClientHandle]:
    clients = []
    for cid, seed_seq in enumerate(client_seeds):
        env_ss, agent_ss = seed_seq.spawn(2)
        env = EpidemicEnv(cfg.client_env_config(cid), seed=env_ss)
        agent = make_agent(cfg.algorithm, cfg.agent, agent_ss)
        clients.append(ClientHandle(cid, env, agent))
    return clients


def init_global_params(cfg: RunConfig, init_ss) -> dict[str, ParamVector]:
    reference = make_agent(cfg.algorithm, cfg.agent, init_ss)
    return reference.params()


def select_clients(n: int, k: int, rng: np.random.Generator) -> list[int]:
    """Uniform sample of k distinct client ids, returned sorted."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    chosen = rng.choice(n, size=k, replace=False)
    return sorted(int(c) for c in chosen)


def local_train(client: ClientHandle, epochs: int) -> LocalTrainResult:
    """Run local epochs (one episode each); only parameters leave the client."""
    rewards = [client.agent.train_episode(client.env) for _ in range(epochs)]
    return LocalTrainResult(client.client_id, client.agent.params(), rewards)


def aggregate(global_model: GlobalModel, results: list[LocalTrainResult]) -> GlobalModel:
    """Elementwise mean of the returned client parameters, per network."""
    if not results:
        raise ValueError("aggregate needs at least one client result")
    ordered = sorted(results, key=lambda r: r.client_id)
    names = sorted(ordered[0].params)
    for res in ordered:
        if sorted(res.params) != names:
            raise ValueError("client parameter sets name different networks")
    merged = {name: average_params([r.params[name] for r in ordered]) for name in names}
    return GlobalModel(merged, global_model.round_index + 1)


def evaluation_seeds(eval_ss, n_episodes: int) -> list[np.random.SeedSequence]:
    return eval_ss.spawn(n_episodes)


def evaluate(
    params: dict[str, ParamVector],
    cfg: RunConfig,
    eval_seeds: list[np.random.SeedSequence],
) -> float:
    """Mean greedy-episode reward on held-out-seed environments."""
    agent = make_agent(cfg.algorithm, cfg.agent, np.random.SeedSequence(0))
    agent.load(params)
    total = 0.0
    for seed_seq in eval_seeds:
        env = EpidemicEnv(cfg.env, seed=seed_seq)
        total += greedy_episode(agent, env)
    return total / len(eval_seeds)


def greedy_episode(agent, env: EpidemicEnv) -> float:
    obs, _ = env.reset()
    total = 0.0
    done = False
    while not done:
        action = agent.act(obs.as_array(), greedy=True)
        if agent.action_kind == "levels":
            outcome = env.step(action)
        else:
            outcome = env.step_intensity(action)
        total += outcome.reward
        obs = outcome.observation
        done = outcome.done
    return total


def random_policy_baseline(cfg: RunConfig, n_episodes: int | None = None) -> float:
    """Mean reward of the uniform-random level policy on the eval seeds."""
    _, _, eval_ss, _ = derive_streams(cfg)
    episodes = n_episodes if n_episodes is not None else cfg.eval_episodes
    seeds = evaluation_seeds(eval_ss, episodes)
    agent = make_agent("random", cfg.agent, np.random.SeedSequence(cfg.seed))
    total = 0.0
    for seed_seq in seeds:
        env = EpidemicEnv(cfg.env, seed=seed_seq)
        total += greedy_episode(agent, env)
    return total / episodes


def _checkpoint(params: dict[str, ParamVector], cfg: RunConfig, out_dir, label: str) -> None:
    if out_dir is None:
        return
    save_param_set(
        params,
        Path(out_dir) / label,
        {"algorithm": cfg.algorithm, "hidden_dims": list(cfg.agent.hidden_dims)},
    )


def run_federated(cfg: RunConfig, checkpoint_dir: str | Path | None = None) -> RunArtifacts:
    """The full federated loop: select, broadcast, train, average, evaluate."""
    cfg.validate()
    fed = cfg.federation
    selection_ss, init_ss, eval_ss, client_seeds = derive_streams(cfg)
    selection_rng = np.random.default_rng(selection_ss)
    eval_seeds = evaluation_seeds(eval_ss, cfg.eval_episodes)
    clients = make_clients(cfg, client_seeds)
    global_model = GlobalModel(init_global_params(cfg, init_ss), round_index=0)

    records: list[RoundRecord] = []
    for round_index in range(1, fed.global_epochs + 1):
        selected = select_clients(fed.n_clients, fed.k_selected, selection_rng)
        results = []
        for cid in selected:
            client = clients[cid]
            client.agent.load(global_model.params)
            results.append(local_train(client, fed.local_epochs))
        global_model = aggregate(global_model, results)
        for res in results:
            mean_reward = (
                sum(res.episode_rewards) / len(res.episode_rewards)
                if res.episode_rewards
                else 0.0
            )
            records.append(
                RoundRecord(round_index, "client", res.client_id, "train",
                            mean_reward, len(res.episode_rewards))
            )
        eval_reward = evaluate(global_model.params, cfg, eval_seeds)
        records.append(
            RoundRecord(round_index, "global", None, "eval", eval_reward, cfg.eval_episodes)
        )
        _checkpoint(global_model.params, cfg, checkpoint_dir, f"round_{round_index:03d}")
    return RunArtifacts(records, global_model.params, cfg.algorithm)


def run_centralized(cfg: RunConfig, checkpoint_dir: str | Path | None = None) -> RunArtifacts:
    """One agent, one environment, evaluated every ``local_epochs`` episodes
    so its round axis aligns with the federated run."""
    cfg.validate()
    fed = cfg.federation
    _, init_ss, eval_ss, client_seeds = derive_streams(cfg)
    eval_seeds = evaluation_seeds(eval_ss, cfg.eval_episodes)
    client = make_clients(cfg, client_seeds)[0]
    client.agent.load(init_global_params(cfg, init_ss))

    records: list[RoundRecord] = []
    for round_index in range(1, fed.global_epochs + 1):
        rewards = [client.agent.train_episode(client.env) for _ in range(fed.local_epochs)]
        mean_reward = sum(rewards) / len(rewards) if rewards else 0.0
        records.append(
            RoundRecord(round_index, "center", None, "train", mean_reward, len(rewards))
        )
        eval_reward = evaluate(client.agent.params(), cfg, eval_seeds)
        records.append(
            RoundRecord(round_index, "center", None, "eval", eval_reward, cfg.eval_episodes)
        )
        _checkpoint(client.agent.params(), cfg, checkpoint_dir, f"round_{round_index:03d}")
    return RunArtifacts(records, client.agent.params(), cfg.algorithm)
