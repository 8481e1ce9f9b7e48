"""Saturation of repeated quantum measurements."""

from satrep._core import (
    Instrument,
    Povm,
    SatrepError,
    Tolerances,
    binary_povm,
    canonicalize,
    compose,
    derived_observable,
    eigh,
    equivalent,
    estimate_spectral_masses,
    hellinger_sq,
    is_repeatable,
    is_sharp,
    ladder,
    luders_binary,
    luders_hellinger_closed_form,
    mixture,
    outcome_distribution,
    preceq,
    preparative,
    repeated_observable,
    run_command,
    sample_frequencies,
    saturation_step,
    spectral_measure_of_effect,
    sqrt_psd,
)

__all__ = [
    "Instrument",
    "Povm",
    "SatrepError",
    "Tolerances",
    "binary_povm",
    "canonicalize",
    "compose",
    "derived_observable",
    "eigh",
    "equivalent",
    "estimate_spectral_masses",
    "hellinger_sq",
    "is_repeatable",
    "is_sharp",
    "ladder",
    "luders_binary",
    "luders_hellinger_closed_form",
    "mixture",
    "outcome_distribution",
    "preceq",
    "preparative",
    "repeated_observable",
    "run_command",
    "sample_frequencies",
    "saturation_step",
    "spectral_measure_of_effect",
    "sqrt_psd",
]
