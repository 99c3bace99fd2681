"""Left/right Bregman proximal maps, Moreau envelopes, the proximal hull,
prox-boundedness scanning, and the two Euclidean/conjugate cross-check routes.

An ``InstanceEngine`` caches per-instance grids and sample arrays (function
values, kernel values, kernel gradients) so that each prox evaluation is one
vectorized objective build plus a golden-section refinement. The envelope is
additionally cached on the interior grid, since the proximal hull is a
supremum of envelope evaluations.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .catalog import Instance, ProperFn
from .errors import (AllUnboundedError, OutsideInteriorError,
                     RangeAssumptionFailedError, UnboundedBelowError)
from .extreal import ExtReal, Interval
from .kernels import Kernel
from .numerics import (DEFAULT_GRID_N, DEFAULT_UNBOUNDED_CAP, GridMin,
                       build_grid, golden_section, grid_minimize,
                       lower_convex_envelope)

__all__ = [
    "ProxResult", "InstanceEngine", "engine",
    "left_prox", "right_prox", "left_env", "right_env", "prox_hull",
    "threshold_scan", "detect_unbounded", "range_probe",
    "euclid_crosscheck", "env_conjugate_crosscheck",
    "hull_function", "hull_instance",
]

INTERIOR_MARGIN = 1e-9


@dataclass(frozen=True)
class ProxResult:
    """Minimizer set of one proximal subproblem plus the envelope value."""

    minimizers: tuple[float, ...]
    value: ExtReal
    in_interior: tuple[bool, ...]
    clusters: tuple

    @property
    def multiple(self) -> bool:
        return len(self.minimizers) > 1


def _grid_n() -> int:
    return int(os.environ.get("BREGMAN_GRID_N", DEFAULT_GRID_N))


class InstanceEngine:
    """Cached grids and sample arrays for one (kernel, fn, lambda) instance."""

    def __init__(self, inst: Instance, grid_n: int | None = None):
        self.inst = inst
        self.kernel = inst.kernel
        self.fn = inst.fn
        self.lam = inst.lam
        n = grid_n or _grid_n()
        dom = self.kernel.domain
        self.x_grid = build_grid(dom, n, window=self.fn.window)
        self.X = self.x_grid.points
        self.F = self.fn.eval_many(self.X)
        self.K = self.kernel.eval_many(self.X)
        interior = Interval(dom.lo, dom.hi, False, False)
        self.y_grid = build_grid(interior, n, window=self.fn.window)
        self.Y = self.y_grid.points
        self.KY = self.kernel.eval_many(self.Y)
        self.GY = self.kernel.grad_many(self.Y)
        self._env_coarse: np.ndarray | None = None
        self._hull_curve = None
        self._contact_mask: np.ndarray | None = None
        self._env_memo: dict[float, float] = {}

    # -- left objective ----------------------------------------------------

    def left_values(self, ybar: float) -> np.ndarray:
        """f + D(., ybar)/lam sampled on the x grid (vectorized)."""
        ky = float(self.kernel.eval(ybar))
        gy = self.kernel.grad(ybar)
        return self.F + (self.K - ky - gy * (self.X - ybar)) / self.lam

    def left_objective(self, ybar: float) -> Callable[[float], float]:
        ky = float(self.kernel.eval(ybar))
        gy = self.kernel.grad(ybar)
        f, k, lam = self.fn.eval, self.kernel.eval, self.lam

        def phi(x: float) -> float:
            return float(f(x)) + (float(k(x)) - ky - gy * (x - ybar)) / lam

        return phi

    def check_interior(self, ybar: float):
        if not self.kernel.domain.interior_contains(float(ybar)):
            raise OutsideInteriorError(
                f"{ybar} not interior to dom {self.kernel.name}")

    def prox(self, ybar: float) -> ProxResult:
        self.check_interior(ybar)
        gm = grid_minimize(self.left_objective(ybar), self.x_grid,
                           values=self.left_values(ybar))
        return self._to_result(gm)

    def _to_result(self, gm: GridMin) -> ProxResult:
        interior = tuple(self.kernel.domain.interior_contains(m, INTERIOR_MARGIN)
                         for m in gm.minimizers)
        return ProxResult(tuple(gm.minimizers), ExtReal(gm.value), interior, gm.clusters)

    def env(self, ybar: float) -> float:
        y = float(ybar)
        if y not in self._env_memo:
            self.check_interior(y)
            gm = grid_minimize(self.left_objective(y), self.x_grid,
                               values=self.left_values(y))
            self._env_memo[y] = gm.value
        return self._env_memo[y]

    # -- envelope cache on the interior grid --------------------------------

    def env_coarse(self) -> np.ndarray:
        """Grid-resolution envelope on the interior grid (no refinement)."""
        if self._env_coarse is None:
            # objective matrix: rows ybar in Y, columns x in X
            D = (self.K[None, :] - self.KY[:, None]
                 - self.GY[:, None] * (self.X[None, :] - self.Y[:, None]))
            vals = self.F[None, :] + D / self.lam
            vals = np.where(np.isnan(vals), np.inf, vals)
            env = vals.min(axis=1)
            if env.min() < -DEFAULT_UNBOUNDED_CAP:
                raise UnboundedBelowError("envelope cache fell below the cap")
            self._env_coarse = env
        return self._env_coarse

    # -- right objective ----------------------------------------------------

    def right_values(self, g_vals: np.ndarray, xbar: float) -> np.ndarray:
        kx = float(self.kernel.eval(xbar))
        if math.isinf(kx):
            return np.full_like(self.Y, np.inf)
        D = kx - self.KY - self.GY * (xbar - self.Y)
        return g_vals + D / self.lam

    def right_objective(self, g_scalar, xbar: float) -> Callable[[float], float]:
        kx = float(self.kernel.eval(xbar))
        k, lam = self.kernel, self.lam

        def psi(y: float) -> float:
            if not k.domain.interior_contains(y):
                return math.inf
            d = kx - float(k.eval(y)) - k.grad(y) * (xbar - y)
            return float(g_scalar(y)) + d / lam

        return psi

    def right_prox(self, xbar: float) -> ProxResult:
        if not self.kernel.domain.contains(float(xbar)):
            raise OutsideInteriorError(f"{xbar} not in dom {self.kernel.name}")
        g_vals = self.fn.eval_many(self.Y)
        gm = grid_minimize(self.right_objective(self.fn.eval, xbar), self.y_grid,
                           values=self.right_values(g_vals, xbar))
        return self._to_result(gm)

    # -- hull curve of lam*f + kappa -----------------------------------------

    def hull_curve(self):
        """Lower convex envelope of (lam f + kappa) sampled on the x grid."""
        if self._hull_curve is None:
            phi = self.lam * self.F + self.K
            self._hull_curve = lower_convex_envelope(zip(self.X, phi))
        return self._hull_curve

    def hull_contact_mask(self) -> np.ndarray:
        """Grid points where the envelope touches lam f + kappa."""
        if self._contact_mask is None:
            phi = self.lam * self.F + self.K
            curve = np.asarray(self.hull_curve().value(self.X), dtype=float)
            both = np.isfinite(phi) & np.isfinite(curve)
            gap = np.full_like(phi, np.inf)
            gap[both] = phi[both] - curve[both]
            self._contact_mask = gap <= 1e-8 * (1.0 + np.abs(np.where(both, phi, 0.0)))
        return self._contact_mask

    def phi_scalar(self, x: float) -> float:
        """(lam f + kappa)(x)."""
        return self.lam * float(self.fn.eval(x)) + float(self.kernel.eval(x))

    def hull_fn_value(self, x):
        """Geometric-route proximal hull: (conv(lam f + kappa) - kappa) / lam.

        Inside grid cells where the envelope touches lam f + kappa at both
        ends the hull equals f and is evaluated through f exactly, so the
        piecewise-linear interpolation error never exceeds the single
        transition cell at each tangency.
        """
        shape = np.shape(x)
        x1 = np.atleast_1d(np.asarray(x, dtype=float))
        conv = np.asarray(self.hull_curve().value(x1), dtype=float)
        kap = self.kernel.eval_many(x1)
        out = np.where(np.isinf(conv), np.inf, (conv - kap) / self.lam)
        contact = self.hull_contact_mask()
        j = np.clip(np.searchsorted(self.X, x1), 1, len(self.X) - 1)
        in_contact = contact[j - 1] & contact[j] & np.isfinite(out)
        if in_contact.any():
            out = np.where(in_contact, self.fn.eval_many(x1), out)
        return out.reshape(shape) if shape else float(out[0])


_ENGINES: dict[tuple[int, int], InstanceEngine] = {}


def engine(inst: Instance) -> InstanceEngine:
    key = (id(inst), _grid_n())
    if key not in _ENGINES:
        _ENGINES[key] = InstanceEngine(inst)
    return _ENGINES[key]


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def left_prox(inst: Instance, ybar: float) -> ProxResult:
    """Global minimizers of f(x) + D(x, ybar)/lam over the kernel domain."""
    return engine(inst).prox(ybar)


def left_env(inst: Instance, ybar: float) -> ExtReal:
    """Infimal value of the left proximal subproblem."""
    return ExtReal(engine(inst).env(ybar))


def right_prox(inst: Instance, xbar: float) -> ProxResult:
    """Global minimizers over interior y of g(y) + D(xbar, y)/lam."""
    return engine(inst).right_prox(xbar)


def right_env(inst: Instance, xbar: float) -> ExtReal:
    return right_prox(inst, xbar).value


def prox_hull(inst: Instance, x: float) -> ExtReal:
    """sup over interior y of env(y) - D(x, y)/lam, refined locally.

    This is the definitional route; the geometric route through the lower
    convex envelope of lam f + kappa is ``engine(inst).hull_fn_value``.
    """
    eng = engine(inst)
    if not eng.kernel.domain.contains(float(x)):
        return ExtReal(math.inf)
    env = eng.env_coarse()
    kx = float(eng.kernel.eval(x))
    if math.isinf(kx):
        return ExtReal(math.inf)
    D = kx - eng.KY - eng.GY * (x - eng.Y)
    psi = env - D / eng.lam
    j = int(np.argmax(np.where(np.isfinite(psi), psi, -np.inf)))
    a = eng.Y[max(j - 1, 0)]
    b = eng.Y[min(j + 1, len(eng.Y) - 1)]

    def neg_psi(y: float) -> float:
        d = kx - float(eng.kernel.eval(y)) - eng.kernel.grad(y) * (x - y)
        return -(eng.env(y) - d / eng.lam)

    _, neg_v = golden_section(neg_psi, a, b, iters=50)
    return ExtReal(-neg_v)


def hull_function(inst: Instance) -> ProperFn:
    """The proximal hull as a catalog-style function (geometric route)."""
    eng = engine(inst)
    curve = eng.hull_curve()
    dom = Interval(curve.x_min, curve.x_max)
    return ProperFn(f"hull_{inst.name}", dom, eng.hull_fn_value, inst.fn.window,
                    convex=None, pb_threshold=inst.fn.pb_threshold)


def hull_instance(inst: Instance) -> Instance:
    return Instance(f"hull_{inst.name}", inst.kernel, hull_function(inst), inst.lam)


# ---------------------------------------------------------------------------
# Prox-boundedness scanning
# ---------------------------------------------------------------------------

def _tail_points(side: str, interval: Interval, window: tuple[float, float]):
    """Geometric probe sequence toward one non-closed side of ``interval``."""
    wlo, whi = window
    span = max(whi - wlo, 1.0)
    if side == "lo":
        if interval.lo_closed:
            return []
        if math.isinf(interval.lo):
            return [wlo - span * 4.0 ** k for k in range(1, 100)]
        x0 = wlo if wlo > interval.lo else interval.lo + span * 1e-3
        return [interval.lo + (x0 - interval.lo) * 0.01 ** k for k in range(1, 150)]
    if interval.hi_closed:
        return []
    if math.isinf(interval.hi):
        return [whi + span * 4.0 ** k for k in range(1, 100)]
    x0 = whi if whi < interval.hi else interval.hi - span * 1e-3
    return [interval.hi - (interval.hi - x0) * 0.01 ** k for k in range(1, 150)]


def detect_unbounded(kernel: Kernel, fn: ProperFn, lam: float, probe_y: float,
                     cap: float = DEFAULT_UNBOUNDED_CAP) -> bool:
    """True when f + D(., probe_y)/lam is diagnosed unbounded below.

    Fires either on values below ``-cap`` on the working grid, or on a
    monotone divergence along a geometric tail toward an open or unbounded
    side (logarithmic divergences never cross a fixed cap on any float grid,
    so a strictly decreasing tail with macroscopic total drop is the signal).
    """
    # scanning deliberately probes lambdas above any annotated threshold
    probe_fn = dataclasses.replace(fn, pb_threshold=None)
    inst = Instance(f"_scan_{fn.name}_{lam:g}", kernel, probe_fn, lam)
    eng = InstanceEngine(inst, grid_n=513)
    try:
        vals = eng.left_values(probe_y)
    except OutsideInteriorError:
        raise
    finite = vals[np.isfinite(vals)]
    if finite.size and finite.min() < -cap:
        return True
    phi = eng.left_objective(probe_y)
    for side in ("lo", "hi"):
        ts = _tail_points(side, kernel.domain, fn.window)
        tail = []
        for t in ts:
            try:
                v = phi(t)
            except (OverflowError, OutsideInteriorError):
                break
            if not math.isfinite(v):
                break
            tail.append(v)
        if len(tail) >= 8:
            drops = [b < a for a, b in zip(tail, tail[1:])]
            if all(drops) and tail[-1] < tail[0] - 1.0:
                return True
            if tail[-1] < -cap:
                return True
    return False


def _probe_point(kernel: Kernel, fn: ProperFn) -> float:
    grid = build_grid(Interval(kernel.domain.lo, kernel.domain.hi, False, False),
                      n=11, window=fn.window)
    return float(0.5 * (grid.lo + grid.hi))


def threshold_scan(kernel: Kernel, fn: ProperFn,
                   lam_grid: np.ndarray) -> tuple[float, float]:
    """Bracket the prox-boundedness threshold on an ascending lambda grid.

    Returns (last finite lambda, first unbounded lambda); the second entry is
    +inf when every lambda in the grid stays bounded.
    """
    lam_grid = np.sort(np.asarray(lam_grid, dtype=float))
    if lam_grid.size == 0:
        raise ValueError("empty lambda grid")
    probe = _probe_point(kernel, fn)
    last_finite = None
    for lam in lam_grid:
        if detect_unbounded(kernel, fn, float(lam), probe):
            if last_finite is None:
                raise AllUnboundedError(f"unbounded already at lambda={lam}")
            return last_finite, float(lam)
        last_finite = float(lam)
    return last_finite, math.inf


# ---------------------------------------------------------------------------
# Range-assumption probe
# ---------------------------------------------------------------------------

def range_probe(inst: Instance, n: int = 500, seed: int = 0,
                margin: float = INTERIOR_MARGIN):
    """Sample ybar across the interior; check all prox outputs stay interior.

    Returns (ok, witnesses) where witnesses are (ybar, minimizer) pairs that
    landed on or beyond the boundary. Empirically falsifiable, not certifiable.
    """
    eng = engine(inst)
    rng = np.random.default_rng(seed)
    lo, hi = eng.y_grid.lo, eng.y_grid.hi
    span = hi - lo
    ys = lo + span * (1e-3 + (1 - 2e-3) * rng.random(n))
    witnesses = []
    for y in ys:
        res = eng.prox(float(y))
        for m, ok in zip(res.minimizers, res.in_interior):
            if not ok:
                witnesses.append((float(y), float(m)))
    return len(witnesses) == 0, witnesses


# ---------------------------------------------------------------------------
# Identity cross-checks (independent routes)
# ---------------------------------------------------------------------------

def _hausdorff(a, b) -> float:
    a, b = list(a), list(b)
    if not a or not b:
        return math.inf
    d1 = max(min(abs(x - y) for y in b) for x in a)
    d2 = max(min(abs(x - y) for y in a) for x in b)
    return max(d1, d2)


def euclid_crosscheck(inst: Instance, ybar: float, grid_n: int = 3001) -> float:
    """Hausdorff gap between the Bregman prox and its Euclidean representation.

    The right side evaluates the ordinary proximal map of the tilted function
    f + (kappa - j)/lam at grad kappa(ybar) on an independent grid, where j is
    the half square.
    """
    eng = engine(inst)
    eng.check_interior(ybar)
    left = eng.prox(ybar)
    z = eng.kernel.grad(ybar)
    lam = eng.lam
    grid = build_grid(eng.kernel.domain, grid_n, window=eng.fn.window)
    xs = grid.points
    shifted = (eng.fn.eval_many(xs)
               + (eng.kernel.eval_many(xs) - 0.5 * np.square(xs)) / lam)
    vals = shifted + 0.5 * np.square(xs - z) / lam

    def psi(w: float) -> float:
        return (float(eng.fn.eval(w))
                + (float(eng.kernel.eval(w)) - 0.5 * w * w) / lam
                + 0.5 * (w - z) ** 2 / lam)

    gm = grid_minimize(psi, grid, values=vals)
    return _hausdorff(left.minimizers, gm.minimizers)


def conjugate_of_tilted(inst: Instance, eta: float, grid_n: int = 4001) -> float:
    """(lam f + kappa)*(eta) by independent grid conjugation with refinement."""
    eng = engine(inst)
    grid = build_grid(eng.kernel.domain, grid_n, window=eng.fn.window)
    xs = grid.points
    phi = eng.lam * eng.fn.eval_many(xs) + eng.kernel.eval_many(xs)
    vals = float(eta) * xs - phi
    j = int(np.argmax(np.where(np.isfinite(vals), vals, -np.inf)))
    a = xs[max(j - 1, 0)]
    b = xs[min(j + 1, len(xs) - 1)]

    def neg(x: float) -> float:
        return -(float(eta) * x - eng.phi_scalar(x))

    _, neg_v = golden_section(neg, a, b)
    return -neg_v


def env_conjugate_crosscheck(inst: Instance, ybar: float) -> float:
    """|lam env(ybar) - kappa*(eta) + (lam f + kappa)*(eta)| at eta = grad kappa(ybar)."""
    eng = engine(inst)
    eng.check_interior(ybar)
    eta = eng.kernel.grad(ybar)
    lhs = eng.lam * eng.env(ybar)
    rhs = float(eng.kernel.conj_eval(eta)) - conjugate_of_tilted(inst, eta)
    return abs(lhs - rhs)
