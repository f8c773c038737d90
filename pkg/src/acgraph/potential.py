"""Double-well potentials and the quantitative constants of their wells.

The constants (rho0, b, m1, beta, rho_tilde) quantify how the potential
behaves near its two minima; the variational estimates downstream consume
them.  They are derived numerically by scanning at a configurable
resolution and re-verified on a finer grid by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Potential:
    c0: float
    c1: float
    V: Callable[[np.ndarray], np.ndarray]
    dV: Callable[[np.ndarray], np.ndarray]
    ddV: Callable[[np.ndarray], np.ndarray]
    description: str = ""
    kind: str = "custom"

    def validate(self, resolution=1e-5):
        """Check the double-well invariants on [c0, c1] by scanning."""
        if not self.c0 < self.c1:
            raise ValueError("need c0 < c1")
        if abs(self.V(self.c0)) > 1e-12 or abs(self.V(self.c1)) > 1e-12:
            raise ValueError("wells must be normalized to V(c0)=V(c1)=0")
        if self.ddV(self.c0) <= 0 or self.ddV(self.c1) <= 0:
            raise ValueError("degenerate minimum")
        h = (self.c1 - self.c0) * resolution
        s = np.arange(self.c0 + h, self.c1 - h / 2, h)
        if np.any(self.V(s) <= 0):
            raise ValueError("interior point with V <= 0: c0, c1 are not "
                             "consecutive absolute minima")
        return self


def quartic(c0=-1.0, c1=1.0):
    """The quartic well (1 - t^2)^2, affinely rescaled so the minima sit at
    c0 and c1."""
    if not c0 < c1:
        raise ValueError("need c0 < c1")
    scale = 2.0 / (c1 - c0)
    shift = c0 + c1

    def to_t(s):
        return (2.0 * np.asarray(s, dtype=float) - shift) / (c1 - c0)

    def V(s):
        t = to_t(s)
        return (1.0 - t * t) ** 2

    def dV(s):
        t = to_t(s)
        return (4.0 * t * t * t - 4.0 * t) * scale

    def ddV(s):
        t = to_t(s)
        return (12.0 * t * t - 4.0) * scale * scale

    return Potential(c0=float(c0), c1=float(c1), V=V, dV=dV, ddV=ddV,
                     description="quartic((1-t^2)^2) on [%g, %g]" % (c0, c1),
                     kind="quartic")


@dataclass(frozen=True)
class PotentialConstants:
    rho0: float
    b: float
    m1: float
    beta: Callable[[float], float] = field(repr=False)
    rho_tilde: Callable[[float], float] = field(repr=False)
    resolution: float = 1e-5

    def as_dict(self):
        return {"rho0": self.rho0, "b": self.b, "m1": self.m1,
                "resolution": self.resolution}


def _scan(P, a, b, h):
    if b <= a:
        return np.array([a])
    return np.linspace(a, b, max(3, int(np.ceil((b - a) / h)) + 1))


def _part_a_ok(P, rho0, b, h):
    """V' monotone increasing and negative on [c1 - 2*b*rho0, c1)."""
    lo = P.c1 - 2 * b * rho0
    ys = _scan(P, lo, P.c1 - h, h)
    d = P.dV(ys)
    return np.all(d < 0) and np.all(np.diff(d) >= -1e-12)


def _part_b_ok(P, rho0, b, h):
    ys = _scan(P, 0.0, 2 * b * rho0, h)
    return np.all(P.V(P.c0 + ys) >= P.V(P.c1 - ys / b) - 1e-12)


def _beta_of(P, rho, b, h):
    lo, hi = P.c0 + 2 * b * rho, P.c1 - 2 * b * rho
    if hi < lo:
        return -np.inf
    ys = _scan(P, lo, hi, h)
    return float(np.min(P.V(ys)) - max(P.V(P.c0 + b * rho),
                                       P.V(P.c1 - b * rho)))


def _rho_tilde_of(P, rho, b, h):
    """Bisection for the smallest rho~ > 0 with V(c0 + rho~) = V(c1 - 2b rho),
    together with V >= V(c0 + rho~) on [c0 + rho~, c1 - 2b rho]."""
    target = float(P.V(P.c1 - 2 * b * rho))
    lo, hi = 0.0, P.c1 - P.c0 - 2 * b * rho
    # V(c0 + y) - target changes sign on (0, hi): negative near 0, and the
    # scan below finds the first crossing
    ys = _scan(P, 0.0, hi, h)
    vals = P.V(P.c0 + ys) - target
    above = np.flatnonzero(vals >= 0)
    if above.size == 0 or above[0] == 0:
        return np.nan
    i = above[0]
    a, c = ys[i - 1], ys[i]
    for _ in range(80):
        m = 0.5 * (a + c)
        if P.V(P.c0 + m) - target < 0:
            a = m
        else:
            c = m
    return 0.5 * (a + c)


def _part_d_ok(P, rho, b, h):
    rt = _rho_tilde_of(P, rho, b, h)
    if not np.isfinite(rt) or rt >= P.c1 - P.c0 - 2 * b * rho:
        return False
    ys = _scan(P, P.c0 + rt, P.c1 - 2 * b * rho, h)
    if np.any(P.V(ys) < P.V(P.c0 + rt) - 1e-12):
        return False
    # closing constraint of the proposition; shrinking rho0 enforces it
    return 2 * b * rho <= (P.c1 - P.c0 - 2 * b * rho - rt) + 1e-12


def derive_constants(P, resolution=None):
    """Numeric search for (rho0, b, m1) and the functions beta, rho_tilde.

    b is searched over powers of two, rho0 by halving from the largest value
    allowed by 4*b*rho0 <= c1 - c0, until parts (a), (b) and (d) verify at
    scan resolution.
    """
    if resolution is None:
        resolution = (P.c1 - P.c0) / 1e5
    h = resolution
    width = P.c1 - P.c0
    for b_exp in range(7):
        b = float(2 ** b_exp)
        rho0 = width / (4 * b)
        while rho0 > 16 * h:
            if (_part_a_ok(P, rho0, b, h) and _part_b_ok(P, rho0, b, h)
                    and _beta_of(P, rho0, b, h) > 0
                    and _part_d_ok(P, rho0, b, h)):
                break
            rho0 /= 2.0
        else:
            continue
        # m1: smallest constant with m1*(y - c1) >= V'(y) on [c1-2b rho0, c1]
        ys = _scan(P, P.c1 - 2 * b * rho0, P.c1 - h, h)
        m1 = float(np.max(P.dV(ys) / (ys - P.c1)))
        return PotentialConstants(
            rho0=rho0, b=b, m1=m1,
            beta=lambda rho, _b=b: _beta_of(P, rho, _b, h),
            rho_tilde=lambda rho, _b=b: _rho_tilde_of(P, rho, _b, h),
            resolution=h)
    raise ValueError("no rho0 above %g found: potential too degenerate at "
                     "this resolution" % (16 * h))


def potential_excess(P, values, D, c):
    """Sum over D of V(x_g) - V(c)."""
    idx = np.fromiter(D, dtype=np.int64, count=-1)
    if idx.size == 0:
        return 0.0
    return float(np.sum(P.V(values[idx]) - P.V(c)))
