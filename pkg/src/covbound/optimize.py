"""Global minimization of a coverage curve over the scaled coefficient.

The curves minimized here (coverage as a function of gamma >= 0) are
smooth but not certifiably unimodal, so the search never assumes
unimodality: a coarse scan over [0, gamma_max] locates the best basin,
golden-section refinement polishes it, and the returned bound is the
minimum over every objective evaluation made along the way plus the
gamma -> infinity tail candidate.  By construction it is <= the scan-grid
minimum.  Ties resolve to the smallest gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["SearchConfig", "BoundResult", "minimize_over_gamma"]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchConfig:
    """Scan range/step and the golden-section target width."""

    gamma_max: float = 30.0
    step: float = 0.1
    refine_tol: float = 1e-6

    def __post_init__(self) -> None:
        if not (self.gamma_max > 0 and 0 < self.step <= self.gamma_max):
            raise ValueError("require gamma_max > 0 and 0 < step <= gamma_max")
        if not 0 < self.refine_tol < 1:
            raise ValueError("refine_tol must lie in (0, 1)")


DEFAULT_SEARCH = SearchConfig()


@dataclass(frozen=True)
class BoundResult:
    """Minimized value, its argmin, evaluation count, final bracket."""

    bound: float
    gamma_star: float
    evaluations: int
    bracket: tuple[float, float]


def minimize_over_gamma(objective, config: SearchConfig | None = None,
                        tail_value: float | None = None) -> BoundResult:
    """Minimize ``objective(gamma)`` over gamma >= 0.

    ``tail_value``, when given, is the known gamma -> infinity limit and
    competes as a final candidate: if it undercuts every evaluation the
    result reports gamma_star = inf.
    """
    cfg = config or DEFAULT_SEARCH
    seen: list[tuple[float, float]] = []

    def f(g: float) -> float:
        v = float(objective(g))
        seen.append((g, v))
        return v

    n_grid = int(round(cfg.gamma_max / cfg.step))
    grid = [i * cfg.step for i in range(n_grid + 1)]
    values = [f(g) for g in grid]
    best = min(range(len(grid)), key=lambda i: (values[i], grid[i]))

    lo = max(0.0, grid[best] - cfg.step)
    hi = min(cfg.gamma_max, grid[best] + cfg.step)
    a, b = lo, hi
    c = b - (b - a) * INV_PHI
    d = a + (b - a) * INV_PHI
    fc, fd = f(c), f(d)
    while b - a > cfg.refine_tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * INV_PHI
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * INV_PHI
            fd = f(d)

    gamma_star, bound = min(seen, key=lambda gv: (gv[1], gv[0]))
    if tail_value is not None and tail_value < bound:
        bound, gamma_star = tail_value, math.inf
    return BoundResult(bound=bound, gamma_star=gamma_star,
                       evaluations=len(seen), bracket=(a, b))
