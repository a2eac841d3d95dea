"""Regression targets y = c_x(t) * x0 + c_eps(t) * eps and their recoverability score."""

from abc import ABC, abstractmethod
from enum import StrEnum

import numpy as np

from erdlab.diffusion.schedules import (
    Schedule,
    broadcast_coefficient,
    check_pair,
    check_time,
)
from erdlab.utils.mixins import CreateInstanceMixin, KindRegistryMixin


class TargetKind(StrEnum):
    EPS = "eps"
    X0 = "x0"
    V = "v"
    U = "u"


class TargetSpec(ABC, KindRegistryMixin, CreateInstanceMixin):
    kind: TargetKind = None

    @abstractmethod
    def coefficients(self, schedule: Schedule, t) -> tuple: ...

    def recoverability(self, schedule: Schedule, t):
        alpha, sigma = schedule.alpha_sigma(t)
        c_x, c_eps = self.coefficients(schedule, t)
        return np.hypot(np.multiply(c_x, alpha), np.multiply(c_eps, sigma))

    def __eq__(self, other) -> bool:
        return isinstance(other, TargetSpec) and self.kind == other.kind

    def __hash__(self) -> int:
        return hash(self.kind)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.kind}>"


def _constant(value: float, t):
    t = check_time(t)
    return float(value) if t.ndim == 0 else np.full(t.shape, float(value))


class EpsTarget(TargetSpec):
    kind = TargetKind.EPS

    def coefficients(self, schedule, t):
        return _constant(0.0, t), _constant(1.0, t)


class X0Target(TargetSpec):
    kind = TargetKind.X0

    def coefficients(self, schedule, t):
        return _constant(1.0, t), _constant(0.0, t)


class VTarget(TargetSpec):
    """Velocity v = alpha * eps - sigma * x0."""

    kind = TargetKind.V

    def coefficients(self, schedule, t):
        alpha, sigma = schedule.alpha_sigma(t)
        return -sigma, alpha


class UTarget(TargetSpec):
    """Flow-matching vector field u = eps - x0."""

    kind = TargetKind.U

    def coefficients(self, schedule, t):
        return _constant(-1.0, t), _constant(1.0, t)


def make_target_spec(kind: str) -> TargetSpec:
    return TargetSpec.get_class(TargetKind(kind)).create_instance()


def make_target(target: TargetSpec, schedule: Schedule, x0, eps, t) -> np.ndarray:
    x0, eps = check_pair(x0, eps)
    c_x, c_eps = target.coefficients(schedule, t)
    return broadcast_coefficient(c_x, x0) * x0 + broadcast_coefficient(c_eps, eps) * eps


def effective_target(target: TargetSpec, schedule: Schedule, x0, eps, t) -> np.ndarray:
    x0, eps = check_pair(x0, eps)
    alpha, sigma = schedule.alpha_sigma(t)
    c_x, c_eps = target.coefficients(schedule, t)
    return (
        broadcast_coefficient(np.multiply(c_x, alpha), x0) * x0
        + broadcast_coefficient(np.multiply(c_eps, sigma), eps) * eps
    )


def recoverability(target: TargetSpec, schedule: Schedule, t):
    """RMS amplitude sqrt((c_x alpha)^2 + (c_eps sigma)^2) of the recoverable target components."""
    omega = target.recoverability(schedule, t)
    return float(omega) if np.ndim(omega) == 0 else omega
