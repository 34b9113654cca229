import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from .learning import LearnerConfig
from .planning import PlannerConfig
from .samplers import SamplerConfig


@dataclass
class Config:
    """Application configuration."""
    out_dir: str
    seed: int
    log_level: str
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)

    @classmethod
    def load(cls, env_file: Optional[str] = None) -> 'Config':
        """Load configuration from environment variables."""
        if env_file:
            load_dotenv(env_file)
        else:
            # Try common locations
            for path in ['.env', Path.home() / '.opcraft' / '.env']:
                if Path(path).exists():
                    load_dotenv(path)
                    break

        out_dir = os.getenv('OPCRAFT_OUT_DIR')
        if not out_dir:
            out_dir = str(Path.home() / '.opcraft' / 'runs')

        seed = int(os.getenv('OPCRAFT_SEED', '0'))

        planner = PlannerConfig(
            n_abstract=int(os.getenv('OPCRAFT_N_ABSTRACT', '8')),
            n_samples=int(os.getenv('OPCRAFT_N_SAMPLES', '10')),
            timeout=float(os.getenv('OPCRAFT_TIMEOUT', '10')),
            max_nodes=int(os.getenv('OPCRAFT_MAX_NODES', '100000')),
            seed=seed,
        )

        sampler = SamplerConfig(
            generator_epochs=int(os.getenv('OPCRAFT_GENERATOR_EPOCHS', '50000')),
            discriminator_epochs=int(os.getenv('OPCRAFT_DISCRIMINATOR_EPOCHS', '10000')),
            seed=seed,
        )

        return cls(
            out_dir=out_dir,
            seed=seed,
            log_level=os.getenv('OPCRAFT_LOG_LEVEL', 'INFO').upper(),
            planner=planner,
            learner=LearnerConfig(),
            sampler=sampler,
        )
