"""SINR distributions, bounds and simulation for 60 GHz directional links
under beam misalignment."""

__version__ = "0.1.0"

from .antenna import BeamParameters, gain, gain_inverse_mainlobe, solve_gain_constants
from .distributions import MixedDistribution, TabulatedCdf
from .geometry import Deployment, NodePair, OrientationMode, sample_deployment
from .misalignment import MisalignmentModel
from .montecarlo import Scenario, ScenarioConfig, SinrSampleSet, simulate

__all__ = [
    "BeamParameters",
    "Deployment",
    "MisalignmentModel",
    "MixedDistribution",
    "NodePair",
    "OrientationMode",
    "Scenario",
    "ScenarioConfig",
    "SinrSampleSet",
    "TabulatedCdf",
    "gain",
    "gain_inverse_mainlobe",
    "sample_deployment",
    "simulate",
    "solve_gain_constants",
]
