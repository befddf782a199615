"""Epidemic decision environment.

A deterministic-given-seed episodic environment: each step the policy picks
seven discrete intervention levels (travel restriction, lockdown, distance
work, masks, testing, health-care capacity, vaccination), the environment
draws a realized intensity for each level from its band, derives four
epidemic rates from the intensities, advances the compartment populations
one tick, and scores the step with a gated health + economy reward.

Level-to-intensity bands: level 0 draws from [0, 0.2), level 1 from
[0.2, 0.5), level 2 from [0.5, 0.75), level 3 from [0.75, 1.0].
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import EnvConfig

N_ACTIONS = 7
N_LEVELS = 4

#: (low, high) intensity band per discrete level.
INTENSITY_BANDS = ((0.0, 0.2), (0.2, 0.5), (0.5, 0.75), (0.75, 1.0))

_BAND_LOW = np.array([b[0] for b in INTENSITY_BANDS])
_BAND_WIDTH = np.array([b[1] - b[0] for b in INTENSITY_BANDS])


@dataclass(frozen=True)
class EpiState:
    """The four rates the agent observes."""

    transmission_rate: float
    identification_rate: float
    death_rate: float
    reinfection_rate: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.transmission_rate,
                self.identification_rate,
                self.death_rate,
                self.reinfection_rate,
            ]
        )


@dataclass(frozen=True)
class Compartments:
    """Population groups advanced by one transition per step.

    ``dead`` is the cumulative death toll (non-decreasing); ``new_deaths``
    is the toll added by the most recent transition, which is what the next
    transition removes from the normal population and what the reward's
    death threshold is compared against.
    """

    normal: float
    current_infected: float
    first_infections: float = 0.0
    reinfections: float = 0.0
    next_infections: float = 0.0
    undiscovered: float = 0.0
    known: float = 0.0
    recovered: float = 0.0
    dead: float = 0.0
    new_deaths: float = 0.0


@dataclass(frozen=True)
class StepOutcome:
    observation: EpiState
    reward: float
    done: bool
    info: dict


def validate_levels(levels) -> np.ndarray:
    arr = np.asarray(levels, dtype=np.int64)
    if arr.shape != (N_ACTIONS,):
        raise ValueError(f"levels must have shape ({N_ACTIONS},), got {arr.shape}")
    if np.any(arr < 0) or np.any(arr >= N_LEVELS):
        raise ValueError(f"levels must be in [0, {N_LEVELS - 1}], got {arr.tolist()}")
    return arr


def sample_intensity(levels, rng: np.random.Generator) -> np.ndarray:
    """Draw one realized intensity per action from the level's band.

    Consumes exactly 7 uniform draws from ``rng``, in action-index order.
    """
    arr = validate_levels(levels)
    u = rng.random(N_ACTIONS)
    return _BAND_LOW[arr] + u * _BAND_WIDTH[arr]


def quantize_intensity(intensity) -> np.ndarray:
    """Map raw intensities in [0, 1] to the discrete level whose band holds them."""
    a = np.asarray(intensity, dtype=float)
    if a.shape != (N_ACTIONS,):
        raise ValueError(f"intensity must have shape ({N_ACTIONS},), got {a.shape}")
    if np.any(a < 0.0) or np.any(a > 1.0):
        raise ValueError("intensity components must be in [0, 1]")
    edges = np.array([b[1] for b in INTENSITY_BANDS[:-1]])
    return np.searchsorted(edges, a, side="right").astype(np.int64)


def compute_rates(intensity, comp: Compartments, cfg: EnvConfig) -> EpiState:
    """Derive the four epidemic rates from realized action intensities.

    Transmission shrinks multiplicatively with each mitigation action and
    grows with density and the infected share of the normal population.
    """
    a = np.asarray(intensity, dtype=float)
    if comp.normal <= 0:
        raise ValueError("population is extinct (normal == 0); episode must terminate")
    c1, c2, c3, c4, c7 = cfg.mitigation_coeffs
    mitigation = (
        (1.0 - c1 * a[0])
        * (1.0 - c2 * a[1])
        * (1.0 - c3 * a[2])
        * (1.0 - c4 * a[3])
        * (1.0 - c7 * a[6])
    )
    s1 = (
        cfg.beta
        * (cfg.density / cfg.density_ref)
        * (comp.current_infected / comp.normal)
        * mitigation
    )
    s1 = min(max(s1, 0.0), 1.0)
    s2 = a[4] * (1.0 - cfg.incubation_days / cfg.incubation_scale)
    s3 = (1.0 - a[5]) * cfg.fatality_rate
    s4 = (1.0 - a[6] * cfg.vaccine_inefficacy) * cfg.reinfection_prob
    return EpiState(float(s1), float(s2), float(s3), float(s4))


def step_transition(comp: Compartments, rates: EpiState) -> Compartments:
    """Advance the compartments one tick.

    Assignments run in fixed order and each right-hand side sees the most
    recently assigned values.  The normal population sheds the previous
    tick's new deaths before new infections are seeded.
    """
    s1, s2, s3, s4 = (
        rates.transmission_rate,
        rates.identification_rate,
        rates.death_rate,
        rates.reinfection_rate,
    )
    current_infected = comp.current_infected + comp.undiscovered
    normal = max(comp.normal - comp.new_deaths, 0.0)
    first_infections = s1 * normal
    reinfections = s4 * comp.recovered
    next_infections = first_infections + reinfections
    known = s2 * next_infections
    # complement rather than (1 - s2) * next keeps known + undiscovered equal
    # to next_infections within 1 ulp
    undiscovered = max(next_infections - known, 0.0)
    recovered = (1.0 - s3) * known
    new_deaths = s3 * known
    dead = comp.dead + new_deaths
    return Compartments(
        normal=normal,
        current_infected=current_infected,
        first_infections=first_infections,
        reinfections=reinfections,
        next_infections=next_infections,
        undiscovered=undiscovered,
        known=known,
        recovered=recovered,
        dead=dead,
        new_deaths=new_deaths,
    )


def compute_reward(
    next_infections: float, deaths: float, intensity, cfg: EnvConfig
) -> tuple[float, float, float]:
    """Gated health + economy score.

    Returns ``(reward, health, economy)``.  The health score pays only while
    next-round infections stay under the infection threshold and the tick's
    deaths stay under the death threshold; the reward pays only while both
    component scores are strictly positive.
    """
    a = np.asarray(intensity, dtype=float)
    w = np.asarray(cfg.action_weights, dtype=float)
    if next_infections < cfg.infection_threshold and deaths < cfg.death_threshold:
        health = (cfg.infection_threshold - next_infections) / cfg.infection_threshold
    else:
        health = 0.0
    economy = 1.0 - float(np.dot(w, a)) / float(np.sum(w))
    reward = health + economy if health > 0.0 and economy > 0.0 else 0.0
    return reward, health, economy


class EpidemicEnv:
    """Single-owner, mutable episodic environment around the five operations."""

    def __init__(self, cfg: EnvConfig, seed=None):
        cfg.validate()
        self.cfg = cfg
        self._rng = np.random.default_rng(seed)
        self._comp: Compartments | None = None
        self._step_count = 0
        self._done = True

    @property
    def compartments(self) -> Compartments:
        if self._comp is None:
            raise RuntimeError("environment has not been reset")
        return self._comp

    @property
    def done(self) -> bool:
        return self._done

    def reset(self, seed=None) -> tuple[EpiState, Compartments]:
        """Start a fresh episode; reseeds the RNG when a seed is given."""
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self._comp = Compartments(
            normal=float(self.cfg.population),
            current_infected=float(self.cfg.initial_infected),
        )
        self._step_count = 0
        self._done = False
        obs = compute_rates(np.zeros(N_ACTIONS), self._comp, self.cfg)
        return obs, self._comp

    def step(self, levels) -> StepOutcome:
        """Apply one tick of discrete intervention levels."""
        if self._comp is None or self._done:
            raise RuntimeError("step() called on a done or unreset episode")
        intensity = sample_intensity(levels, self._rng)
        return self._advance(intensity)

    def step_intensity(self, intensity) -> StepOutcome:
        """Continuous entry point: quantize to levels, re-randomize in-band."""
        if self._comp is None or self._done:
            raise RuntimeError("step_intensity() called on a done or unreset episode")
        levels = quantize_intensity(intensity)
        realized = sample_intensity(levels, self._rng)
        return self._advance(realized)

    def _advance(self, intensity: np.ndarray) -> StepOutcome:
        rates = compute_rates(intensity, self._comp, self.cfg)
        self._comp = step_transition(self._comp, rates)
        reward, health, economy = compute_reward(
            self._comp.next_infections, self._comp.new_deaths, intensity, self.cfg
        )
        self._step_count += 1
        self._done = self._step_count >= self.cfg.horizon or self._comp.normal <= 0.0
        return StepOutcome(
            observation=rates,
            reward=reward,
            done=self._done,
            info={
                "intensity": intensity,
                "compartments": self._comp,
                "health": health,
                "economy": economy,
                "step": self._step_count,
            },
        )
