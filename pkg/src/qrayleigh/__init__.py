"""Quantum Rayleigh collision model: a qubit bombarded by correlated two-qubit projectiles.

Library layout:

* :mod:`qrayleigh.qmath` - dense tensor/partial-trace/expm primitives and state validation
* :mod:`qrayleigh.states` - thermal qubit and the projectile state families
* :mod:`qrayleigh.measures` - coherence, classical correlations, discord, entanglement
* :mod:`qrayleigh.collision` - exchange Hamiltonian and collision unitaries
* :mod:`qrayleigh.dynamics` - analytic solution, master-equation generator, Monte Carlo oracle
* :mod:`qrayleigh.thermo` - temperatures, currents, entropy production, Onsager coefficients
* :mod:`qrayleigh.fpcheck` - heat-equation coefficients and jump-moment consistency
* :mod:`qrayleigh.cli` - figure datasets, sweeps and the check suite (``qrayleigh`` command)
"""

from .states import BathParams, ProjectileKind, QubitSpec, Scenario

__version__ = "0.1.0"

__all__ = ["BathParams", "ProjectileKind", "QubitSpec", "Scenario", "__version__"]
