"""Navigation functions on planar sphere worlds and gradient-descent planning.

The potential is ``phi = d^2 / (d^(2k) + beta)^(1/k)`` with ``d`` the
distance to the goal and ``beta`` the product over obstacles of
``|q - c_i|^2 - r_i^2``. It is 0 at the goal, 1 on every obstacle boundary
and, for large enough ``k``, free of spurious local minima.
"""

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .._validation import check_vector, raise_if
from ..errors import DomainError, ValidationError


@dataclass(frozen=True)
class Obstacle:
    center: tuple
    radius: float


@dataclass
class SphereWorld:
    """Disc obstacles, a goal and a bounding disc of the workspace."""

    obstacles: List[Obstacle]
    goal: np.ndarray
    bound_radius: float = 1.0
    kappa: float = 5.0

    def __post_init__(self):
        self.obstacles = [o if isinstance(o, Obstacle) else Obstacle(tuple(o[0]), float(o[1]))
                          for o in self.obstacles]
        self.goal = check_vector(self.goal, "goal", 2)
        raise_if(self.problems())
        self._centers = [tuple(float(c) for c in o.center) for o in self.obstacles]
        self._radii_sq = [float(o.radius) ** 2 for o in self.obstacles]

    def problems(self):
        out = []
        for i, o in enumerate(self.obstacles):
            if len(o.center) != 2 or not all(math.isfinite(c) for c in o.center):
                out.append(f"obstacles[{i}].center must be a finite 2-vector")
            if not (math.isfinite(o.radius) and o.radius > 0):
                out.append(f"obstacles[{i}].radius must be > 0, got {o.radius!r}")
        if out:
            return out
        for i in range(len(self.obstacles)):
            for j in range(i + 1, len(self.obstacles)):
                a, b = self.obstacles[i], self.obstacles[j]
                gap = math.dist(a.center, b.center) - a.radius - b.radius
                if gap <= 0:
                    out.append(f"obstacles[{i}] and obstacles[{j}] overlap (gap {gap:.4g})")
        for i, o in enumerate(self.obstacles):
            if math.dist(o.center, self.goal) <= o.radius:
                out.append(f"goal lies inside obstacles[{i}]")
            if math.hypot(*o.center) + o.radius > self.bound_radius:
                out.append(f"obstacles[{i}] extends past the workspace bound")
        if math.hypot(*self.goal) >= self.bound_radius:
            out.append("goal lies outside the workspace bound")
        if not self.kappa >= 2:
            out.append(f"kappa must be >= 2, got {self.kappa!r}")
        return out

    @classmethod
    def reference(cls, kappa=5.0):
        """Four-obstacle world with the goal at (-0.4, 0)."""
        obstacles = [
            Obstacle((-0.2, -0.35), 0.17),
            Obstacle((0.4, 0.46), 0.19),
            Obstacle((0.43, -0.38), 0.22),
            Obstacle((-0.58, 0.44), 0.24),
        ]
        return cls(obstacles, np.array([-0.4, 0.0]), bound_radius=1.0, kappa=kappa)

    def obstacle_factors(self, q):
        x, y = q
        return [(x - cx) ** 2 + (y - cy) ** 2 - r2
                for (cx, cy), r2 in zip(self._centers, self._radii_sq)]

    def clearance(self, q):
        """Distance from ``q`` to the nearest obstacle surface (negative inside)."""
        if not self.obstacles:
            return math.inf
        return min(math.dist(q, o.center) - o.radius for o in self.obstacles)

    def is_free(self, q):
        return all(b > 0 for b in self.obstacle_factors(q)) and math.hypot(*q) <= self.bound_radius


def _evaluate(q, world, gradient):
    factors = world.obstacle_factors(q)
    for i, b in enumerate(factors):
        if b < 0:
            raise DomainError(f"point {list(q)} lies inside obstacles[{i}]")
    beta = math.prod(factors)
    k = world.kappa
    dx, dy = q[0] - world.goal[0], q[1] - world.goal[1]
    d2 = dx * dx + dy * dy
    if not gradient:
        if beta == 0.0:
            return 1.0
        return d2 / (d2 ** k + beta) ** (1.0 / k)
    if beta == 0.0:
        raise DomainError(f"gradient undefined on obstacle boundary at {list(q)}")
    # d beta = sum_i 2 (q - c_i) prod_{j != i} beta_j
    gbx = gby = 0.0
    for i, ((cx, cy), _) in enumerate(zip(world._centers, factors)):
        others = math.prod(factors[:i] + factors[i + 1:])
        gbx += 2.0 * (q[0] - cx) * others
        gby += 2.0 * (q[1] - cy) * others
    s = d2 ** k + beta
    s_pow = s ** (-1.0 / k)
    coef = d2 * s_pow / (k * s)
    dk = k * d2 ** (k - 1)
    gx = 2.0 * dx * s_pow - coef * (dk * 2.0 * dx + gbx)
    gy = 2.0 * dy * s_pow - coef * (dk * 2.0 * dy + gby)
    return np.array([gx, gy])


def navigation_potential(q, world):
    """Value of the navigation function at ``q``, in [0, 1].

    Raises:
        DomainError: if ``q`` is strictly inside an obstacle.
    """
    q = check_vector(q, "q", 2)
    return _evaluate((float(q[0]), float(q[1])), world, gradient=False)


def potential_gradient(q, world):
    """Analytic gradient of :func:`navigation_potential`.

    Raises:
        DomainError: if ``q`` is inside an obstacle or on its boundary.
    """
    q = check_vector(q, "q", 2)
    return _evaluate((float(q[0]), float(q[1])), world, gradient=True)


def potential_grid(world, xs, ys):
    """Evaluate the potential on the grid ``xs x ys``; NaN inside obstacles.

    Returns an array indexed ``[iy, ix]``.
    """
    out = np.full((len(ys), len(xs)), np.nan)
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            q = (float(x), float(y))
            if all(b >= 0 for b in world.obstacle_factors(q)):
                out[iy, ix] = _evaluate(q, world, gradient=False)
    return out


@dataclass
class PathResult:
    """Waypoints of a descent path and how it ended."""

    waypoints: np.ndarray
    converged: bool
    closest_obstacle_clearance: float
    potentials: np.ndarray = field(repr=False, default=None)
    clearances: np.ndarray = field(repr=False, default=None)
    message: str = ""

    @property
    def iterations(self):
        return len(self.waypoints) - 1

    def rows(self):
        for i, ((x, y), phi, c) in enumerate(zip(self.waypoints, self.potentials, self.clearances)):
            yield i, float(x), float(y), float(phi), float(c)


def plan_path(start, world, step=0.005, tolerance=0.01, max_iters=5000):
    """Normalized gradient descent on the navigation function.

    Each iteration moves ``step`` along ``-grad phi / |grad phi|``. A step
    that would enter an obstacle or fail to lower ``phi`` is halved until it
    does, so every waypoint stays in free space. Running out of iterations
    or reaching a stationary point away from the goal returns an
    unconverged result, which usually means ``kappa`` is too small.
    """
    q = check_vector(start, "start", 2)
    if not all(b > 0 for b in world.obstacle_factors(q)):
        raise DomainError(f"start {q.tolist()} is not in free space")
    if not (step > 0 and tolerance > 0 and max_iters >= 0):
        raise ValidationError("step, tolerance must be > 0 and max_iters >= 0")

    q = (float(q[0]), float(q[1]))
    goal = (float(world.goal[0]), float(world.goal[1]))
    phi = _evaluate(q, world, gradient=False)
    points, phis = [q], [phi]
    converged, message = False, "max_iters exhausted"
    for _ in range(max_iters):
        if math.dist(q, goal) < tolerance:
            converged, message = True, "reached goal"
            break
        g = _evaluate(q, world, gradient=True)
        norm = math.hypot(g[0], g[1])
        if norm == 0.0:
            message = "stationary point away from goal"
            break
        h = step
        while True:
            cand = (q[0] - h * g[0] / norm, q[1] - h * g[1] / norm)
            if all(b > 0 for b in world.obstacle_factors(cand)):
                phi_c = _evaluate(cand, world, gradient=False)
                if phi_c < phi:
                    break
            h *= 0.5
            if h < 1e-12:
                cand = None
                break
        if cand is None:
            message = "no descent step found (local minimum)"
            break
        q, phi = cand, phi_c
        points.append(q)
        phis.append(phi)
    else:
        if math.dist(q, goal) < tolerance:
            converged, message = True, "reached goal"

    clearances = np.array([world.clearance(p) for p in points])
    return PathResult(
        waypoints=np.array(points),
        converged=converged,
        closest_obstacle_clearance=float(clearances.min()),
        potentials=np.array(phis),
        clearances=clearances,
        message=message,
    )


def random_free_points(world, n, rng):
    """``n`` points drawn uniformly from the free part of the bounding disc."""
    out = []
    while len(out) < n:
        r = world.bound_radius * math.sqrt(rng.uniform())
        a = rng.uniform(0.0, 2.0 * math.pi)
        q = (r * math.cos(a), r * math.sin(a))
        if all(b > 0 for b in world.obstacle_factors(q)):
            out.append(q)
    return np.array(out)


def multi_start(world, n=100, seed=0, **plan_kwargs):
    """Plan from ``n`` random free starts; returns the list of results."""
    rng = np.random.default_rng(seed)
    return [plan_path(s, world, **plan_kwargs) for s in random_free_points(world, n, rng)]
