"""Loss-weight rules normalized to unit mean over t ~ Uniform[0, 1]."""

from abc import ABC, abstractmethod
from enum import StrEnum

import numpy as np
from scipy.integrate import trapezoid

from erdlab.diffusion.schedules import Schedule, check_time
from erdlab.diffusion.targets import TargetSpec
from erdlab.errors import ContractError
from erdlab.utils.mixins import KindRegistryMixin

NORMALIZATION_POINTS = 1025


class WeightKind(StrEnum):
    UNIFORM = "uniform"
    ERD = "erd"
    CLAMPED_SNR = "clamped_snr"


class WeightRule(ABC, KindRegistryMixin):
    """A weight rule bound to one (target, schedule) pair.

    The normalization constant is the trapezoid mean of the raw weight over a
    1025-point uniform t-grid, computed once at construction.
    """

    kind: WeightKind = None

    def __init__(self, target: TargetSpec, schedule: Schedule):
        self.target = target
        self.schedule = schedule
        grid = np.linspace(0.0, 1.0, NORMALIZATION_POINTS)
        self.normalization = float(trapezoid(self.raw(grid), grid))
        if not self.normalization > 0.0:
            raise ContractError(
                f"{self.kind} weight for {target.kind}/{schedule.kind} has zero mass"
            )

    @abstractmethod
    def raw(self, t: np.ndarray) -> np.ndarray: ...

    def __call__(self, t):
        t_arr = check_time(t)
        weight = self.raw(t_arr) / self.normalization
        return float(weight) if np.ndim(t) == 0 else weight

    def describe(self) -> dict:
        return {"weight": str(self.kind)}

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.target.kind}/{self.schedule.kind} Z={self.normalization:.6g}>"


class UniformWeight(WeightRule):
    kind = WeightKind.UNIFORM

    def raw(self, t):
        return np.ones_like(t, dtype=np.float64)


class ErdWeight(WeightRule):
    kind = WeightKind.ERD

    def raw(self, t):
        return np.asarray(self.target.recoverability(self.schedule, t), dtype=np.float64)


class ClampedSnrWeight(WeightRule):
    """min(SNR, gamma) / SNR, a Min-SNR style baseline."""

    kind = WeightKind.CLAMPED_SNR

    def __init__(self, target: TargetSpec, schedule: Schedule, gamma: float = 5.0):
        if gamma <= 0:
            raise ContractError(f"gamma must be positive, got {gamma}")
        self.gamma = float(gamma)
        super().__init__(target, schedule)

    def raw(self, t):
        snr = np.asarray(self.schedule.snr(t), dtype=np.float64)
        # SNR = inf at sigma = 0 gives weight 0; SNR <= gamma (including 0) gives 1
        with np.errstate(divide="ignore", invalid="ignore"):
            clamped = np.where(snr <= self.gamma, 1.0, self.gamma / snr)
        return clamped

    def describe(self) -> dict:
        return super().describe() | {"gamma": self.gamma}


def make_weight_rule(
    kind: str, target: TargetSpec, schedule: Schedule, gamma: float = 5.0
) -> WeightRule:
    rule_class = WeightRule.get_class(WeightKind(kind))
    if rule_class is ClampedSnrWeight:
        return ClampedSnrWeight(target, schedule, gamma)
    return rule_class(target, schedule)


def check_binding(rule: WeightRule, target: TargetSpec, schedule: Schedule):
    if rule.target != target or rule.schedule != schedule:
        raise ContractError(
            f"{rule!r} was built for {rule.target.kind}/{rule.schedule.kind}, "
            f"not {target.kind}/{schedule.kind}"
        )


def loss_weight(rule: WeightRule, target: TargetSpec, schedule: Schedule, t):
    check_binding(rule, target, schedule)
    return rule(t)


def allocation_density(rule: WeightRule, target: TargetSpec, schedule: Schedule, lam):
    """Allocation over log-SNR under uniform t-sampling: w(t(lambda)) * |dt/dlambda|."""
    check_binding(rule, target, schedule)
    t = np.atleast_1d(np.asarray(schedule.time_of_log_snr(lam), dtype=np.float64))
    interior = (t > 0.0) & (t < 1.0)
    density = np.zeros_like(t)
    t_inner = t[interior]
    density[interior] = rule(t_inner) / np.abs(schedule.dlog_snr_dt(t_inner))
    return float(density[0]) if np.ndim(lam) == 0 else density
