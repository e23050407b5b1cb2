"""Divergence between two trajectories and sensitivity of the missing coupling term."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Iterable

import numpy as np

from .actuation import Variant, velocity_coefficients
from .params import RobotParams, drive_constants, validate
from .sim import Trajectory

CHANNELS = ("v", "vn", "omega", "x", "y", "theta")


@dataclass(frozen=True)
class ChannelError:
    max: float
    rms: float


@dataclass(frozen=True)
class DivergenceReport:
    scenario: str
    channels: dict[str, ChannelError]
    threshold: float
    first_exceedance: float | None  # first sample time with |dv_n| > threshold

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "channels": {k: asdict(v) for k, v in self.channels.items()},
            "threshold": self.threshold,
            "first_exceedance": self.first_exceedance,
        }


def diff_trajectories(ta: Trajectory, tb: Trajectory, threshold: float = 1e-3,
                      scenario: str = "") -> DivergenceReport:
    if ta.t.shape != tb.t.shape or not np.array_equal(ta.t, tb.t):
        raise ValueError("trajectories must share the same time grid")
    if not threshold > 0:
        raise ValueError("threshold must be > 0")
    delta = np.abs(ta.states() - tb.states())
    channels = {
        name: ChannelError(float(delta[:, i].max()), float(np.sqrt(np.mean(delta[:, i] ** 2))))
        for i, name in enumerate(CHANNELS)
    }
    hits = np.nonzero(delta[:, 1] > threshold)[0]
    first = float(ta.t[hits[0]]) if hits.size else None
    return DivergenceReport(scenario, channels, threshold, first)


def missing_term_magnitude(params: RobotParams) -> float:
    """``|a12|`` of the correct state matrix; ``damping * d / M`` at the 30 degree mount."""
    co = velocity_coefficients(params, Variant.CORRECT)
    return drive_constants(params).damping * co["fvn_omega"] / params.mass


def sensitivity_sweep(params: RobotParams, field: str,
                      values: Iterable[float]) -> list[tuple[float, float]]:
    """Tabulate the missing lateral coupling as ``field`` (``r`` or ``r_a``) varies."""
    if field not in ("r", "r_a"):
        raise ValueError("sweep field must be 'r' or 'r_a'")
    table = []
    for x in values:
        if not x > 0:
            raise ValueError("sweep values must be > 0")
        p = validate(replace(params, **{field: float(x)}))
        table.append((float(x), missing_term_magnitude(p)))
    return table
