"""
D2KE 抽样层：p(ω) 规格与确定性抽样

Author: gngdingghuan
"""

from sampling.distributions import (
    RandomTimeSeries,
    RandomString,
    RandomVectorSet,
    DataHoldout,
    OmegaDistribution,
    default_distribution,
    distribution_from_dict,
    with_length_max,
)
from sampling.sampler import (
    OmegaSample,
    derive_seed,
    mix64,
    sample_omegas,
    unit_sphere_vector,
    save_omega_sample,
    load_omega_sample,
)

__all__ = [
    "RandomTimeSeries",
    "RandomString",
    "RandomVectorSet",
    "DataHoldout",
    "OmegaDistribution",
    "default_distribution",
    "distribution_from_dict",
    "with_length_max",
    "OmegaSample",
    "derive_seed",
    "mix64",
    "sample_omegas",
    "unit_sphere_vector",
    "save_omega_sample",
    "load_omega_sample",
]
