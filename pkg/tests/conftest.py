from __future__ import annotations

import numpy as np
import pytest

from qrayleigh.states import BathParams, ProjectileKind, Scenario, coherence_bounds

KINDS = (ProjectileKind.CLASSICAL, ProjectileKind.DISCORDANT, ProjectileKind.ENTANGLED)
SCENARIOS = (Scenario.SEQUENTIAL, Scenario.COLLECTIVE)


def random_bath(rng: np.random.Generator, kind=None, scenario=None, rate_p=None) -> BathParams:
    kind = kind if kind is not None else KINDS[rng.integers(len(KINDS))]
    scenario = scenario if scenario is not None else SCENARIOS[rng.integers(2)]
    beta = float(rng.uniform(0.5, 4.0))
    chi = float(rng.uniform(-1.0, 1.0))
    return BathParams(
        kind=kind,
        beta_B=beta,
        coherence=chi * coherence_bounds(kind, beta)[1],
        scenario=scenario,
        J=1.0,
        tau=float(rng.uniform(0.02, 1.3)),
        rate_p=float(rng.uniform(0.5, 2.0)) if rate_p is None else rate_p,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
