"""Per-operator samplers for controller parameters."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..envs import BaseEnvironment
from ..learning import AbstractDemonstration, OperatorDataset, Transition
from ..learning.consistency import controller_bindings
from ..symbolic import GroundOperator, Object, Operator, State
from .networks import BinaryClassifier, GaussianRegressor

logger = logging.getLogger(__name__)


class InsufficientData(ValueError):
    """Too few positive examples to fit a sampler."""


@dataclass
class SamplerConfig:
    generator_epochs: int = 50000
    discriminator_epochs: int = 10000
    hidden_sizes: Tuple[int, ...] = (32, 32)
    learning_rate: float = 1e-3
    rejection_limit: int = 100
    accept_threshold: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.generator_epochs < 0 or self.discriminator_epochs < 0:
            raise ValueError("epoch counts must be non-negative")
        if self.rejection_limit < 1:
            raise ValueError("rejection_limit must be at least 1")
        self.hidden_sizes = tuple(self.hidden_sizes)


class BaseSampler(ABC):
    """Proposes a theta for one grounding of one operator."""

    kind: str = ''

    def __init__(self, operator_name: str, theta_dim: int):
        self.operator_name = operator_name
        self.theta_dim = theta_dim

    @abstractmethod
    def sample(self, state: State, ground_op: GroundOperator,
               rng: np.random.Generator) -> Tuple[float, ...]:
        pass

    def to_dict(self) -> Dict:
        return {'kind': self.kind, 'operator': self.operator_name, 'theta_dim': self.theta_dim}


class TrivialSampler(BaseSampler):
    """For controllers without continuous parameters."""

    kind = 'trivial'

    def __init__(self, operator_name: str):
        super().__init__(operator_name, 0)

    def sample(self, state, ground_op, rng):
        return ()


class GaussianSampler(BaseSampler):
    """Fixed diagonal Gaussian, used when there is too little data to learn."""

    kind = 'gaussian'

    def __init__(self, operator_name: str, mean: Sequence[float], std: Sequence[float]):
        super().__init__(operator_name, len(mean))
        self.mean = np.asarray(mean, dtype=float)
        self.std = np.asarray(std, dtype=float)

    def sample(self, state, ground_op, rng):
        draw = self.mean + self.std * rng.standard_normal(self.theta_dim)
        return tuple(float(v) for v in draw)

    def to_dict(self) -> Dict:
        data = super().to_dict()
        data.update(mean=self.mean.tolist(), std=self.std.tolist())
        return data


class LearnedSampler(BaseSampler):
    """Gaussian generator filtered by a discriminator through rejection sampling.

    Without a discriminator every draw is accepted.
    """

    kind = 'learned'

    def __init__(self, operator_name: str, generator: GaussianRegressor,
                 discriminator: Optional[BinaryClassifier], rejection_limit: int = 100,
                 accept_threshold: float = 0.5):
        super().__init__(operator_name, generator.output_dim)
        self.generator = generator
        self.discriminator = discriminator
        self.rejection_limit = rejection_limit
        self.accept_threshold = accept_threshold
        self.last_draws = 0

    def sample(self, state, ground_op, rng):
        x = state.vec(ground_op.objects)
        theta = None
        self.last_draws = 0
        for _ in range(self.rejection_limit):
            theta = self.generator.sample(x, rng)
            self.last_draws += 1
            if self.discriminator is None:
                break
            p = self.discriminator.predict_proba(np.concatenate([x, theta]))[0]
            if p >= self.accept_threshold:
                break
        return tuple(float(v) for v in theta)

    def to_dict(self) -> Dict:
        data = super().to_dict()
        data.update(
            generator=self.generator.to_dict(),
            discriminator=self.discriminator.to_dict() if self.discriminator else None,
            rejection_limit=self.rejection_limit,
            accept_threshold=self.accept_threshold,
        )
        return data


class OracleSampler(BaseSampler):
    """Delegates to the environment's hand-written parameter choice."""

    kind = 'oracle'

    def __init__(self, operator_name: str, theta_dim: int, env: BaseEnvironment):
        super().__init__(operator_name, theta_dim)
        self.env = env

    def sample(self, state, ground_op, rng):
        return tuple(self.env.oracle_theta(ground_op, state))


def sampler_from_dict(data: Dict, env: Optional[BaseEnvironment] = None) -> BaseSampler:
    kind = data['kind']
    name = data['operator']
    if kind == 'oracle':
        if env is None:
            raise ValueError(f"Oracle sampler for {name} needs an environment")
        return OracleSampler(name, data['theta_dim'], env)
    if kind == 'trivial':
        return TrivialSampler(name)
    if kind == 'gaussian':
        return GaussianSampler(name, data['mean'], data['std'])
    if kind == 'learned':
        disc = data.get('discriminator')
        return LearnedSampler(
            name,
            GaussianRegressor.from_dict(data['generator']),
            BinaryClassifier.from_dict(disc) if disc else None,
            rejection_limit=data['rejection_limit'],
            accept_threshold=data['accept_threshold'],
        )
    raise ValueError(f"Unknown sampler kind: {kind}")


def sample(sampler: BaseSampler, state: State, ground_op: GroundOperator,
           rng: np.random.Generator) -> Tuple[float, ...]:
    return sampler.sample(state, ground_op, rng)


def _low_level_state(demo: AbstractDemonstration, index: int) -> State:
    if demo.source is None:
        raise ValueError(f"Demo {demo.demo_id} has no low-level states attached")
    return demo.source.states[index]


def _negative_objects(op: Operator, transition: Transition,
                      objects: Sequence[Object]) -> Optional[Tuple[Object, ...]]:
    fixed = controller_bindings(op, transition.action)
    if fixed is None:
        return None
    bound = []
    for var in op.parameters:
        if var in fixed:
            bound.append(fixed[var])
            continue
        candidates = [o for o in objects if o.type == var.type]
        if not candidates:
            return None
        bound.append(candidates[0])
    return tuple(bound)


def _training_sets(op: Operator, datasets: OperatorDataset,
                   demos: Sequence[AbstractDemonstration]) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    by_id = {d.demo_id: d for d in demos}
    pos_x, pos_y = [], []
    positive_keys = set()
    for dp in datasets.get(op.name, []):
        t = dp.transition
        positive_keys.add(t.key)
        x = _low_level_state(by_id[t.demo_id], t.index).vec(dp.objects)
        pos_x.append(x)
        pos_y.append(t.action.theta_array)
    neg_x, neg_y = [], []
    for demo in demos:
        for t in demo.transitions:
            if t.action.controller_id != op.controller_id or t.key in positive_keys:
                continue
            objs = _negative_objects(op, t, demo.objects)
            if objs is None:
                continue
            neg_x.append(_low_level_state(demo, t.index).vec(objs))
            neg_y.append(t.action.theta_array)

    def stack(rows):
        return np.asarray(rows, dtype=float) if rows else np.zeros((0, 0))
    return stack(pos_x), stack(pos_y), stack(neg_x), stack(neg_y)


def _fit_one(op: Operator, pos_x: np.ndarray, pos_y: np.ndarray, neg_x: np.ndarray,
             neg_y: np.ndarray, cfg: SamplerConfig, rng: np.random.Generator) -> LearnedSampler:
    if len(pos_x) < 2:
        raise InsufficientData(f"{op.name} has {len(pos_x)} positive examples")
    generator = GaussianRegressor.fit(pos_x, pos_y, cfg.hidden_sizes, cfg.generator_epochs,
                                      cfg.learning_rate, rng)
    discriminator = None
    if len(neg_x):
        inputs = np.concatenate([np.hstack([pos_x, pos_y]), np.hstack([neg_x, neg_y])])
        labels = np.concatenate([np.ones(len(pos_x)), np.zeros(len(neg_x))])
        discriminator = BinaryClassifier.fit(inputs, labels, cfg.hidden_sizes,
                                             cfg.discriminator_epochs, cfg.learning_rate, rng)
    else:
        logger.debug("No negatives for %s; discriminator accepts everything", op.name)
    return LearnedSampler(op.name, generator, discriminator, cfg.rejection_limit,
                          cfg.accept_threshold)


def fit_samplers(ops: Sequence[Operator], datasets: OperatorDataset,
                 demos: Sequence[AbstractDemonstration], env: BaseEnvironment,
                 cfg: Optional[SamplerConfig] = None) -> Dict[str, BaseSampler]:
    """One sampler per operator, trained on the transitions assigned to it."""
    cfg = cfg or SamplerConfig()
    samplers: Dict[str, BaseSampler] = {}
    for i, op in enumerate(sorted(ops, key=lambda o: o.name)):
        theta_dim = env.controllers[op.controller_id].theta_dim
        if theta_dim == 0:
            samplers[op.name] = TrivialSampler(op.name)
            continue
        pos_x, pos_y, neg_x, neg_y = _training_sets(op, datasets, demos)
        rng = np.random.default_rng(cfg.seed + i)
        try:
            samplers[op.name] = _fit_one(op, pos_x, pos_y, neg_x, neg_y, cfg, rng)
        except InsufficientData as e:
            logger.warning("Falling back to a unit Gaussian sampler: %s", e)
            mean = pos_y.mean(axis=0) if len(pos_y) else np.zeros(theta_dim)
            samplers[op.name] = GaussianSampler(op.name, mean, np.ones(theta_dim))
            continue
        logger.info("Fitted sampler for %s on %d positives, %d negatives",
                    op.name, len(pos_x), len(neg_x))
    return samplers


def oracle_samplers(ops: Sequence[Operator], env: BaseEnvironment) -> Dict[str, BaseSampler]:
    samplers: Dict[str, BaseSampler] = {}
    for op in ops:
        theta_dim = env.controllers[op.controller_id].theta_dim
        samplers[op.name] = (TrivialSampler(op.name) if theta_dim == 0
                             else OracleSampler(op.name, theta_dim, env))
    return samplers
