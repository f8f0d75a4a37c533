"""Magnitude constraint set: distance, projection, reflection, pole detection.

The constraint set collects every coefficient vector whose componentwise
magnitudes equal a fixed nonnegative target ``s``. It is compact but
nonconvex. The nearest-point projection has a closed form (rescale each
component to the target magnitude, keep its phase) and is unique except on
the pole set: vectors with a zero component where the target is positive.
There all phases are equally close and we take the zero-phase selection.
"""

import numpy as np

from .errors import BadShape

__all__ = [
    "as_magnitudes",
    "project_magnitude",
    "distance_c2",
    "in_pole_set",
    "reflect_magnitude",
]

#: Relative threshold (times max |c_i|) used by default for pole diagnostics.
POLE_RTOL = 1e-12


def as_magnitudes(s):
    """Validate and return a magnitude target as a float64 array.

    Entries must be finite and nonnegative.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 1:
        raise BadShape(f"magnitude target must be 1-D, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("magnitude target contains non-finite entries")
    if np.any(s < 0):
        raise ValueError("magnitude target contains negative entries")
    return s


def _as_pair(c, s):
    c = np.asarray(c, dtype=complex)
    s = as_magnitudes(s)
    if c.shape != s.shape:
        raise BadShape(f"coefficient/magnitude length mismatch: {c.shape} vs {s.shape}")
    return c, s


def project_magnitude(c, s):
    """Project ``c`` onto the set of vectors with magnitudes ``s``.

    Component ``i`` becomes ``s[i] * c[i] / |c[i]|`` when ``c[i] != 0`` and
    ``s[i]`` (zero phase) when ``c[i] == 0``. The zero branch fires on exact
    zeros only; use :func:`in_pole_set` for a tolerance-based diagnostic.
    """
    c, s = _as_pair(c, s)
    mag = np.abs(c)
    nonzero = mag > 0.0
    safe = np.where(nonzero, mag, 1.0)
    return np.where(nonzero, s * (c / safe), s.astype(complex))


def distance_c2(c, s):
    """Euclidean distance from ``c`` to the magnitude constraint set.

    Equals ``|| |c| - s ||_2``, which is also the distance to the closed-form
    projection.
    """
    c, s = _as_pair(c, s)
    return float(np.linalg.norm(np.abs(c) - s))


def in_pole_set(c, s, tol=None):
    """Check whether ``c`` sits (numerically) on the pole set.

    A component is a pole hit when ``|c[i]| <= tol`` while ``s[i] > tol``;
    there the nearest-point projection is not unique. ``tol`` defaults to
    ``POLE_RTOL * max|c|``.

    Returns ``(hit, indices)`` with the offending component indices.
    """
    c, s = _as_pair(c, s)
    if tol is None:
        tol = POLE_RTOL * (float(np.max(np.abs(c))) if c.size else 0.0)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    indices = np.flatnonzero((np.abs(c) <= tol) & (s > tol))
    return indices.size > 0, indices


def reflect_magnitude(c, s):
    """Reflect ``c`` across the magnitude set: ``2 * projection - c``.

    An involution wherever the projection is single-valued (off the pole set).
    """
    return 2.0 * project_magnitude(c, s) - np.asarray(c, dtype=complex)
