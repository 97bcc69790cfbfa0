"""Tunnelling-time statistics for Gaussian wave packets on a rectangular barrier."""

from ._core import (
    HBAR,
    HBAR2_OVER_2M,
    BarrierSpec,
    ConfigError,
    DomainError,
    Error,
    NumericalError,
    OverBarrierComponent,
    ScatteringAmplitudes,
    ScenarioConfig,
    UnreliableStatistic,
    WindowTooNarrow,
    energy_of,
    figure_lattice,
    inside_wavenumber,
    parse_config,
    phase_time,
    run_checks,
    run_profile,
    run_single,
    scattering_amplitudes,
    transmission_probability,
    wavenumber_of,
    write_figures,
)

__all__ = [name for name in dir() if not name.startswith("_")]
