"""Selection methods, their cutoff constants, and the problem container.

Each selection method (AIC, BIC, Mallows Cp, adjusted R^2, marginal
t-tests) is equivalent, for deciding between the full model and the
single-coefficient submodel, to the rule

    keep the submodel  iff  |T| < d,

where T is the t statistic of the last coefficient and d a method-specific
cutoff.  ``selection_threshold`` returns d for finite samples;
``asymptotic_threshold`` returns the large-n limit d' where one exists
(AIC and Cp give sqrt(2), adjusted R^2 gives 1; BIC's cutoff grows without
bound and t-tests pin d to the test size, so neither has a limit and both
map to ``NOT_APPLICABLE``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .special import t_quantile

__all__ = [
    "SelectionMethod",
    "BoundProblem",
    "NotApplicable",
    "NOT_APPLICABLE",
    "METHOD_NAMES",
    "selection_threshold",
    "asymptotic_threshold",
]

METHOD_NAMES = ("aic", "bic", "cp", "adjr2", "ttest")


class NotApplicable:
    """Typed marker for requests with no defined answer (never a number)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NotApplicable"

    def __bool__(self) -> bool:
        return False


NOT_APPLICABLE = NotApplicable()


@dataclass(frozen=True)
class SelectionMethod:
    """A model-selection rule; ``test_size`` only applies to ``ttest``."""

    kind: str
    test_size: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in METHOD_NAMES:
            raise ValueError(f"unknown method {self.kind!r}; "
                             f"expected one of {METHOD_NAMES}")
        if self.kind == "ttest":
            if self.test_size is None or not 0.0 < self.test_size < 1.0:
                raise ValueError("ttest requires test_size in (0, 1)")
        elif self.test_size is not None:
            raise ValueError(f"{self.kind} does not take a test_size")

    @classmethod
    def from_name(cls, name: str, test_size: float | None = None) -> "SelectionMethod":
        kind = name.strip().lower()
        if kind == "ttest" and test_size is None:
            raise ValueError("ttest requires an explicit test_size")
        return cls(kind, test_size if kind == "ttest" else None)


@dataclass(frozen=True)
class BoundProblem:
    """Coverage problem: nominal level 1-alpha, p regressors, n observations,
    rho the correlation between the target estimator and the last
    coefficient estimator.  m = n - p error degrees of freedom.
    """

    alpha: float
    p: int
    n: int
    rho: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.p != int(self.p) or self.p < 2:
            raise ValueError("p must be an integer >= 2")
        if self.n != int(self.n) or self.n <= self.p:
            raise ValueError("n must be an integer > p")
        if not abs(self.rho) <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")

    @property
    def m(self) -> int:
        return int(self.n) - int(self.p)

    @classmethod
    def from_m(cls, alpha: float, p: int, m: int, rho: float) -> "BoundProblem":
        return cls(alpha=alpha, p=int(p), n=int(p) + int(m), rho=rho)


def selection_threshold(method: SelectionMethod, n: int, p: int) -> float:
    """Finite-sample cutoff d: the submodel is kept iff |T| < d."""
    if n <= p:
        raise ValueError("need n > p")
    m = n - p
    if method.kind in ("aic", "bic"):
        fn = 1.0 if method.kind == "aic" else 0.5 * math.log(n)
        return math.sqrt(math.expm1(2.0 * fn / n) * m)
    if method.kind == "cp":
        return math.sqrt(2.0)
    if method.kind == "adjr2":
        return 1.0
    return t_quantile(m, method.test_size)


def asymptotic_threshold(method: SelectionMethod):
    """Large-n cutoff d', or NOT_APPLICABLE for BIC and t-tests."""
    if method.kind in ("aic", "cp"):
        return math.sqrt(2.0)
    if method.kind == "adjr2":
        return 1.0
    return NOT_APPLICABLE
