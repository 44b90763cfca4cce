"""Shared fixtures: the built-in target battery and small helpers."""

import numpy as np
import pytest

import automala as am


def target_battery():
    """Built-in targets at d <= 8, paired with the step-size cap used by the
    involution and volume tests.

    The caps keep leapfrog intermediates inside the range where float64
    round-trips cancel to ~1e-10; above them the quartic magnitude response
    of the stiff targets amplifies rounding far past any meaningful
    tolerance (an implementation error still produces O(1) violations well
    below every cap).
    """
    return [
        (am.make_normal_iid(1), 10.0),
        (am.make_normal_iid(4), 10.0),
        (am.make_normal_iid(8), 10.0),
        (am.make_anisotropic_normal(0), 10.0),
        (am.make_anisotropic_normal(2), 0.5),
        (am.make_funnel(2, 2.0), 2.0),
        (am.make_funnel(8, 2.0), 2.0),
        (am.make_banana(2, 1.0), 1.0),
        (am.make_banana(8, 1.0), 0.5),
    ]


@pytest.fixture(scope="session")
def battery():
    return target_battery()


def fd_jacobian(flow, z, base_step=1e-5):
    """Richardson-extrapolated central-difference Jacobian of ``flow``.

    Combining steps h and h/2 cancels the leading O(h^2) truncation term,
    which otherwise dominates on stiff targets where third derivatives of
    the flow are large.
    """
    n = z.size
    jac = np.empty((n, n))
    for i in range(n):
        h = base_step * (1.0 + abs(z[i]))
        cols = []
        for step in (h, 0.5 * h):
            hi, lo = z.copy(), z.copy()
            hi[i] += step
            lo[i] -= step
            cols.append((flow(hi) - flow(lo)) / (2.0 * step))
        jac[:, i] = (4.0 * cols[1] - cols[0]) / 3.0
    return jac


class ScriptedRNG:
    """Feed predetermined draws into kernels for hand-computed cases."""

    def __init__(self, normals=(), uniforms=()):
        self._normals = list(normals)
        self._uniforms = list(uniforms)

    def standard_normal(self, n):
        out = np.array([self._normals.pop(0) for _ in range(n)])
        return out

    def random(self, n=None):
        if n is None:
            return self._uniforms.pop(0)
        return np.array([self._uniforms.pop(0) for _ in range(n)])


@pytest.fixture
def scripted_rng():
    return ScriptedRNG
