"""Semantic-vector arithmetic: transition signals and motion-neutral projection.

All vectors are 1-D float64 numpy arrays living in the per-head value-cache
representation space.  Everything here is a pure function; the only state is
in the caller.

The projection family removes the component of a prompt-transition vector
along the local motion tangent.  ``project_motion_neutral_exact`` is the
closed form; ``project_motion_neutral_stabilized`` adds an ``eps`` to the
denominator so a tiny or zero tangent cannot amplify noise; and
``qp_projection_oracle`` solves the underlying equality-constrained
least-squares problem by a Householder change of basis, deliberately not
using the closed form, so the two can check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateTangentError

# Orthogonality tolerance, scaled by ||d||*||m|| at the call site so it is
# dimension- and magnitude-robust in double precision.
TOL_ORTH = 1e-9

# The brute-force oracle is test-scale only.
ORACLE_MAX_DIM = 64


def as_vector(components, name: str = "vector") -> np.ndarray:
    """Validate and copy an arbitrary sequence into a semantic vector."""
    v = np.array(components, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise ConfigurationError(f"{name} must be a non-empty 1-D sequence", field=name)
    if not np.all(np.isfinite(v)):
        raise ConfigurationError(f"{name} has non-finite components", field=name)
    return v


def _check_dims(a: np.ndarray, b: np.ndarray, op: str) -> None:
    if a.shape != b.shape:
        raise ConfigurationError(f"{op}: dimension mismatch {a.shape} vs {b.shape}")


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm.

    Uses dot(a,b) / sqrt(dot(a,a) * dot(b,b)) so that bitwise-identical
    inputs give exactly 1.0 (sqrt of an exact square is exact in IEEE
    double).  When the squared-norm product over- or underflows, the inputs
    are rescaled by their largest components first; the rescaled path keeps
    the same exactness property.
    """
    aa = float(np.dot(a, a))
    bb = float(np.dot(b, b))
    if aa == 0.0 or bb == 0.0:
        return 0.0
    prod = aa * bb
    if prod == 0.0 or not math.isfinite(prod):
        a = a / float(np.abs(a).max())
        b = b / float(np.abs(b).max())
        aa = float(np.dot(a, a))
        bb = float(np.dot(b, b))
        prod = aa * bb
    return float(np.dot(a, b)) / math.sqrt(prod)


def prompt_delta(prev: np.ndarray, curr: np.ndarray) -> np.ndarray:
    """Transition vector between consecutive prompt signatures."""
    _check_dims(prev, curr, "prompt_delta")
    return curr - prev


def switch_strength(prev: np.ndarray, curr: np.ndarray) -> float:
    """1 - cosine(prev, curr), clamped to [0, 2]; 0.0 for a zero signature.

    A zero-norm signature carries no usable semantic information, so the
    switch signal is suppressed rather than treated as maximal.
    """
    _check_dims(prev, curr, "switch_strength")
    if float(np.dot(prev, prev)) == 0.0 or float(np.dot(curr, curr)) == 0.0:
        return 0.0
    return min(max(1.0 - cosine(prev, curr), 0.0), 2.0)


def motion_tangent(v_prev: np.ndarray, v_curr: np.ndarray) -> np.ndarray:
    """Finite-difference tangent of the cache trajectory."""
    _check_dims(v_prev, v_curr, "motion_tangent")
    return v_curr - v_prev


def project_motion_neutral_exact(delta: np.ndarray, tangent: np.ndarray) -> np.ndarray:
    """Orthogonal projection of ``delta`` onto the complement of ``tangent``.

        delta - (<delta, tangent> / ||tangent||^2) * tangent

    Raises DegenerateTangentError for a zero tangent; callers should fall
    back to the stabilized form there.
    """
    _check_dims(delta, tangent, "project_motion_neutral_exact")
    mm = float(np.dot(tangent, tangent))
    if mm == 0.0:
        raise DegenerateTangentError("motion tangent has zero norm")
    coeff = float(np.dot(delta, tangent)) / mm
    return delta - coeff * tangent


def project_motion_neutral_stabilized(
    delta: np.ndarray, tangent: np.ndarray, eps: float
) -> np.ndarray:
    """Projection with an eps-regularized denominator.

        delta - (<delta, tangent> / (||tangent||^2 + eps)) * tangent

    Well defined for any tangent, including zero (where it returns ``delta``
    unchanged).  The residual along the tangent is exactly
    ``eps / (||tangent||^2 + eps) * <delta, tangent>``.
    """
    _check_dims(delta, tangent, "project_motion_neutral_stabilized")
    if eps <= 0:
        raise ConfigurationError("eps must be positive", field="eps_stabilized")
    mm = float(np.dot(tangent, tangent))
    coeff = float(np.dot(delta, tangent)) / (mm + eps)
    return delta - coeff * tangent


def qp_projection_oracle(delta: np.ndarray, tangent: np.ndarray) -> np.ndarray:
    """Independent solution of min ||x - delta|| s.t. <x, tangent> = 0.

    Builds a Householder reflection H mapping ``tangent`` to a coordinate
    axis, zeroes that coordinate of the reflected ``delta``, and maps back.
    Test-scale only (dim <= 64); must never route through the closed form.
    """
    _check_dims(delta, tangent, "qp_projection_oracle")
    if delta.size > ORACLE_MAX_DIM:
        raise ConfigurationError(f"oracle supports dim <= {ORACLE_MAX_DIM}")
    nm = float(np.linalg.norm(tangent))
    if nm == 0.0:
        raise DegenerateTangentError("oracle needs a nonzero tangent")

    # v = tangent + sign(t0)*||tangent||*e0; the matching sign keeps
    # |v0| = |t0| + ||tangent|| > 0, so the reflector never degenerates.
    sign = 1.0 if tangent[0] >= 0.0 else -1.0
    v = tangent.astype(np.float64).copy()
    v[0] += sign * nm
    vv = float(np.dot(v, v))

    def reflect(x: np.ndarray) -> np.ndarray:
        return x - (2.0 * float(np.dot(v, x)) / vv) * v

    reflected = reflect(delta)
    reflected[0] = 0.0
    return reflect(reflected)


@dataclass(frozen=True)
class TransitionSignal:
    """Per-head bundle produced at a prompt switch."""

    delta: np.ndarray
    delta_perp: np.ndarray
    strength: float
    tangent: np.ndarray
