"""Two-sided content-platform market model with generative-AI supply.

Analytic layer: :mod:`platform_sim.model`, :mod:`platform_sim.equilibrium`.
Simulation layer: :mod:`platform_sim.engine`, :mod:`platform_sim.metrics`,
:mod:`platform_sim.experiments`; named parameter sets in
:mod:`platform_sim.calibration`. Command line: :mod:`platform_sim.cli`.
"""

__version__ = "0.1.0"
