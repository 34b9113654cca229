from .base import (
    ArityMismatch,
    BaseEnvironment,
    ControllerSpec,
    Demonstration,
    OracleFailure,
    Task,
    TaskScale,
    UnknownController,
)
from .cluttered1d import Cluttered1DEnvironment
from .satellites import SatellitesEnvironment
from .screws import ScrewsEnvironment

__all__ = [
    "ArityMismatch", "BaseEnvironment", "ControllerSpec", "Demonstration",
    "OracleFailure", "Task", "TaskScale", "UnknownController",
    "Cluttered1DEnvironment", "SatellitesEnvironment", "ScrewsEnvironment",
]
