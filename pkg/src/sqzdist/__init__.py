"""Photon-counting statistics of partially distinguishable squeezed light.

Probabilities are read off as Taylor coefficients of a determinant
generating function ``c_r det(I - H_r conj(H_r))^(-1/2)``.
"""

from .distinguishability import (
    GaussianPulseModel,
    HomogeneousModel,
    classical_probability,
    delay_scan,
    effective_thermal_occupation,
    gaussian_overlap,
    homogeneous_decomposition,
    homogeneous_overlap,
)
from .errors import CapacityError, ScenarioError, SeriesError, SqzDistError
from .fock_oracle import displaced_average_probability, gram_amplitudes, oracle_distribution
from .generating import evaluate_generating_function, expand_generating_function
from .model import (
    Efficiencies,
    Interferometer,
    OverlapMatrix,
    Scenario,
    SqueezeParams,
    beamsplitter_unitary,
    haar_random_unitary,
    tritter_unitary,
    validate_scenario,
)
from .pnr import ProbabilityTable, distribution, hafnian, indistinguishable_probability, probability
from .threshold import click_pattern_probability, click_table

__version__ = "0.1.0"
