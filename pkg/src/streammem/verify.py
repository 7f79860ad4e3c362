"""Property verification suite for the projection kernel.

Five checks over seeded random cases: closed form vs the Householder
oracle, orthogonality of the projected transition, minimum distortion
among feasible updates, the semantic-preservation bound, and the
stabilized-form residual identity.  Each case derives its own labeled
stream so a failure message pins down the exact reproduction seed.

The projection functions are injectable so a deliberately broken build
can serve as a negative control for the suite itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError
from .rng import DeterministicStream
from .vectors import (
    project_motion_neutral_exact,
    project_motion_neutral_stabilized,
    qp_projection_oracle,
)

CHECK_NAMES = (
    "oracle_equivalence",
    "orthogonality",
    "minimum_distortion",
    "semantic_preservation",
    "stabilized_residual",
)

DEFAULT_DIMS = (2, 3, 8, 32)
FEASIBLE_SAMPLES = 100
STABILIZED_EPSILONS = (1.0, 1e-3, 1e-6)

TOL_EQUIV = 1e-6
TOL_ORTH = 1e-9
TOL_BOUND = 1e-9
TOL_RESIDUAL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    failures: tuple[str, ...]
    max_error: float

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]
    cases_per_dim: int
    dims: tuple[int, ...]
    seed: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _feasible_directions(tangent: np.ndarray, count: int, stream: DeterministicStream) -> np.ndarray:
    """Random vectors exactly orthogonal to the tangent, via a Householder frame."""
    dim = tangent.size
    nm = float(np.linalg.norm(tangent))
    sign = 1.0 if tangent[0] >= 0.0 else -1.0
    v = tangent.copy()
    v[0] += sign * nm
    vv = float(np.dot(v, v))
    z = stream.normals((count, dim))
    z[:, 0] = 0.0
    return z - np.outer((2.0 / vv) * (z @ v), v)


def run_verification(
    cases: int,
    seed: int = 0,
    dims: Sequence[int] = DEFAULT_DIMS,
    exact_fn: Optional[Callable] = None,
    stabilized_fn: Optional[Callable] = None,
    oracle_fn: Optional[Callable] = None,
) -> VerificationReport:
    if cases < 1:
        raise ConfigurationError("cases must be >= 1", field="cases")
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise ConfigurationError("dims must all be >= 2", field="dims")
    exact = exact_fn or project_motion_neutral_exact
    stabilized = stabilized_fn or project_motion_neutral_stabilized
    oracle = oracle_fn or qp_projection_oracle

    failures: dict[str, list[str]] = {name: [] for name in CHECK_NAMES}
    max_err = {name: 0.0 for name in CHECK_NAMES}

    def record(name: str, err: float, tol: float, case_id: str) -> None:
        max_err[name] = max(max_err[name], err)
        if err > tol:
            failures[name].append(case_id)

    for dim in dims:
        for i in range(cases):
            case_id = f"seed={seed} dim={dim} case={i}"
            stream = DeterministicStream(seed, "verify", dim, i)
            delta = stream.normals(dim)
            tangent = stream.normals(dim)
            while float(np.linalg.norm(tangent)) == 0.0:
                tangent = stream.normals(dim)
            d_norm = float(np.linalg.norm(delta))
            m_norm = float(np.linalg.norm(tangent))

            perp = exact(delta, tangent)

            diff = float(np.linalg.norm(perp - oracle(delta, tangent)))
            record("oracle_equivalence", diff, TOL_EQUIV * max(d_norm, 1e-30), case_id)

            ortho = abs(float(np.dot(perp, tangent)))
            record("orthogonality", ortho, TOL_ORTH * max(d_norm * m_norm, 1e-30), case_id)

            feasible = _feasible_directions(tangent, FEASIBLE_SAMPLES, stream)
            best = float(np.linalg.norm(perp - delta))
            dists = np.linalg.norm(feasible - delta, axis=1)
            record("minimum_distortion", float(np.max(best - dists)), TOL_BOUND, case_id)

            # rescale feasible samples into the semantic-bound regime
            perp_norm = float(np.linalg.norm(perp))
            norms = np.linalg.norm(feasible, axis=1)
            safe = np.where(norms == 0.0, 1.0, norms)
            radii = stream.uniforms(FEASIBLE_SAMPLES) * perp_norm
            capped = feasible * (radii / safe)[:, None]
            responses = capped @ delta
            bound = float(np.dot(perp, delta))
            record(
                "semantic_preservation",
                float(np.max(responses - bound)),
                TOL_BOUND,
                case_id,
            )

            mm = float(np.dot(tangent, tangent))
            dm = float(np.dot(delta, tangent))
            worst = 0.0
            prev_gap = None
            monotone = True
            for eps in STABILIZED_EPSILONS:
                stab = stabilized(delta, tangent, eps)
                residual = float(np.dot(stab, tangent)) - (eps / (mm + eps)) * dm
                worst = max(worst, abs(residual))
                gap = float(np.linalg.norm(stab - perp))
                if prev_gap is not None and gap > prev_gap + 1e-12 * max(d_norm, 1.0):
                    monotone = False
                prev_gap = gap
            if not monotone:
                worst = max(worst, float("inf"))
            record("stabilized_residual", worst, TOL_RESIDUAL, case_id)

    checks = tuple(
        CheckResult(
            name=name,
            cases=cases * len(dims),
            failures=tuple(failures[name][:10]),
            max_error=max_err[name],
        )
        for name in CHECK_NAMES
    )
    return VerificationReport(checks=checks, cases_per_dim=cases, dims=dims, seed=seed)
