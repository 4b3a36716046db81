"""Power-split search: the data/AN split maximizing the closed-form secrecy bound."""

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .channel import check_config
from .metrics import secrecy_rate_bound
from .precoder import Scheme


@dataclass(frozen=True)
class PhiSearchSpec:
    """``cfg.phi`` is ignored; the grid is ``grid_step, 2*grid_step, ... < 1``."""

    cfg: object
    scheme: Scheme
    grid_step: float = 0.01
    refine: bool = False
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not 0.0 < self.grid_step <= 0.1:
            raise ValueError(f"grid_step must be in (0, 0.1], got {self.grid_step}")


@dataclass(frozen=True)
class PhiSearchResult:
    phi_star: float
    secrecy_star: float
    curve: list  # [(phi, secrecy), ...] on the grid
    zero_secrecy: bool


def phi_grid(step):
    n = int(np.floor((1.0 - 1e-9) / step))
    return np.round(np.arange(1, n + 1) * step, 12)


def optimize_phi(spec):
    """Grid search (ties go to the smaller phi, i.e. more AN) with optional golden-section polish.

    Refinement brackets the best interior grid point by its neighbours and
    is only kept if it improves on the grid value.
    """
    check_config(spec.cfg, need_eve_bound=True)

    def secrecy(phi):
        return secrecy_rate_bound(spec.scheme, spec.cfg.replace(phi=float(phi)), spec.k)

    grid = phi_grid(spec.grid_step)
    values = [secrecy(p) for p in grid]
    curve = [(float(p), float(v)) for p, v in zip(grid, values)]
    i = int(np.argmax(values))  # first maximum, i.e. smallest phi
    phi_star, best = curve[i]
    if best <= 0.0:
        return PhiSearchResult(phi_star, 0.0, curve, True)
    if spec.refine and 0 < i < len(grid) - 1:
        res = optimize.minimize_scalar(lambda p: -secrecy(p), bracket=(grid[i - 1], grid[i], grid[i + 1]),
                                       method="golden", options={"xtol": 1e-8})
        if res.success and grid[i - 1] < res.x < grid[i + 1] and -res.fun > best:
            phi_star, best = float(res.x), float(-res.fun)
    return PhiSearchResult(phi_star, best, curve, False)
