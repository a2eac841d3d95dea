"""Continuous-time noise schedules on t in [0, 1] and their log-SNR view.

Every schedule maps t to (alpha, sigma) with x_t = alpha * x0 + sigma * eps.
Functions accept scalars or numpy arrays of t and return the same shape.
"""

from abc import ABC, abstractmethod
from enum import StrEnum

import numpy as np
from scipy.special import expit

from erdlab.errors import ContractError, DomainError
from erdlab.utils.mixins import CreateInstanceMixin, KindRegistryMixin

DEFAULT_LAMBDA_CLAMP = 20.0


class ScheduleKind(StrEnum):
    LINEAR = "linear"
    VP = "vp"
    GVP = "gvp"


def check_time(t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(t)) or np.any((t < 0.0) | (t > 1.0)):
        raise DomainError(f"Diffusion time must lie in [0, 1], got {t}")
    return t


def _like(value: np.ndarray, t):
    return float(value) if np.ndim(t) == 0 else value


class Schedule(ABC, KindRegistryMixin, CreateInstanceMixin):
    kind: ScheduleKind = None

    def __init__(self, lambda_clamp: float = DEFAULT_LAMBDA_CLAMP):
        if lambda_clamp <= 0:
            raise DomainError(f"lambda_clamp must be positive, got {lambda_clamp}")
        self.lambda_clamp = float(lambda_clamp)

    @abstractmethod
    def _alpha_sigma(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...

    @abstractmethod
    def _time_of_log_snr(self, lam: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _dlog_snr_dt(self, t: np.ndarray) -> np.ndarray: ...

    def alpha_sigma(self, t):
        alpha, sigma = self._alpha_sigma(check_time(t))
        return _like(alpha, t), _like(sigma, t)

    def log_snr(self, t):
        alpha, sigma = self._alpha_sigma(check_time(t))
        with np.errstate(divide="ignore"):
            lam = 2.0 * (np.log(alpha) - np.log(sigma))
        lam = np.clip(lam, -self.lambda_clamp, self.lambda_clamp)
        return _like(lam, t)

    def snr(self, t):
        alpha, sigma = self._alpha_sigma(check_time(t))
        with np.errstate(divide="ignore"):
            return _like(np.square(alpha) / np.square(sigma), t)

    @property
    def sigma_max(self) -> float:
        return float(self._alpha_sigma(np.float64(1.0))[1])

    def time_of_log_snr(self, lam):
        lam = np.asarray(lam, dtype=np.float64)
        if np.any(np.abs(lam) > self.lambda_clamp):
            raise DomainError(
                f"log-SNR must lie in [-{self.lambda_clamp}, {self.lambda_clamp}], got {lam}"
            )
        return _like(np.clip(self._time_of_log_snr(lam), 0.0, 1.0), lam)

    def dlog_snr_dt(self, t):
        t_arr = check_time(t)
        if np.any((t_arr <= 0.0) | (t_arr >= 1.0)):
            raise DomainError(f"dlambda/dt is defined on the open interval (0, 1), got {t}")
        return _like(self._dlog_snr_dt(t_arr), t)

    def describe(self) -> dict:
        return {"schedule": str(self.kind), "lambda_clamp": self.lambda_clamp}

    def __eq__(self, other) -> bool:
        return isinstance(other, Schedule) and self.describe() == other.describe()

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.describe().items())))

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.describe()}>"


class LinearSchedule(Schedule):
    """Flow-matching interpolant: alpha = 1 - t, sigma = t."""

    kind = ScheduleKind.LINEAR

    def _alpha_sigma(self, t):
        return 1.0 - t, t

    def _time_of_log_snr(self, lam):
        return expit(-lam / 2.0)

    def _dlog_snr_dt(self, t):
        return -2.0 / (t * (1.0 - t))


class VpSchedule(Schedule):
    kind = ScheduleKind.VP

    def __init__(
        self,
        beta_min: float = 0.1,
        beta_max: float = 20.0,
        lambda_clamp: float = DEFAULT_LAMBDA_CLAMP,
    ):
        super().__init__(lambda_clamp)
        if not 0.0 < beta_min <= beta_max:
            raise DomainError(
                f"VP schedule needs 0 < beta_min <= beta_max, got ({beta_min}, {beta_max})"
            )
        self.beta_min = float(beta_min)
        self.beta_max = float(beta_max)

    def integral(self, t):
        """B(t) = beta_min * t + (beta_max - beta_min) * t^2 / 2."""
        return self.beta_min * t + 0.5 * (self.beta_max - self.beta_min) * np.square(t)

    def _alpha_sigma(self, t):
        b = self.integral(t)
        # -expm1(-B) keeps alpha^2 + sigma^2 == 1 to rounding near t = 0
        return np.exp(-0.5 * b), np.sqrt(-np.expm1(-b))

    def _time_of_log_snr(self, lam):
        # alpha^2 = sigmoid(lambda), so B = softplus(-lambda)
        b = np.logaddexp(0.0, -lam)
        a = 0.5 * (self.beta_max - self.beta_min)
        if a == 0.0:
            return b / self.beta_min
        return (-self.beta_min + np.sqrt(self.beta_min**2 + 4.0 * a * b)) / (2.0 * a)

    def _dlog_snr_dt(self, t):
        beta = self.beta_min + (self.beta_max - self.beta_min) * t
        return -beta / (-np.expm1(-self.integral(t)))

    def describe(self) -> dict:
        return super().describe() | {"beta_min": self.beta_min, "beta_max": self.beta_max}


class GvpSchedule(Schedule):
    """Spherical interpolant: alpha = cos(pi t / 2), sigma = sin(pi t / 2)."""

    kind = ScheduleKind.GVP

    def _alpha_sigma(self, t):
        alpha = np.cos(0.5 * np.pi * t)
        sigma = np.sin(0.5 * np.pi * t)
        # cos(pi/2) is 6e-17 in floating point; the endpoint is exactly noise
        return np.where(t == 1.0, 0.0, alpha), sigma

    def _time_of_log_snr(self, lam):
        return (2.0 / np.pi) * np.arctan(np.exp(-lam / 2.0))

    def _dlog_snr_dt(self, t):
        return -2.0 * np.pi / np.sin(np.pi * t)


def make_schedule(
    kind: str,
    beta_min: float = 0.1,
    beta_max: float = 20.0,
    lambda_clamp: float = DEFAULT_LAMBDA_CLAMP,
) -> Schedule:
    schedule_class = Schedule.get_class(ScheduleKind(kind))
    if schedule_class is VpSchedule:
        return VpSchedule(beta_min, beta_max, lambda_clamp)
    return schedule_class.create_instance(lambda_clamp)


def alpha_sigma(schedule: Schedule, t):
    return schedule.alpha_sigma(t)


def log_snr(schedule: Schedule, t):
    return schedule.log_snr(t)


def sigma_max(schedule: Schedule) -> float:
    return schedule.sigma_max


def time_of_log_snr(schedule: Schedule, lam):
    return schedule.time_of_log_snr(lam)


def dlog_snr_dt(schedule: Schedule, t):
    return schedule.dlog_snr_dt(t)


def broadcast_coefficient(coefficient, points: np.ndarray) -> np.ndarray:
    coefficient = np.asarray(coefficient, dtype=np.float64)
    if coefficient.ndim == 0 or points.ndim == 1:
        return coefficient
    if coefficient.shape != points.shape[:1]:
        raise ContractError(
            f"Got {coefficient.shape[0]} times for {points.shape[0]} points"
        )
    return coefficient[:, None]


def check_pair(x0, eps) -> tuple[np.ndarray, np.ndarray]:
    x0 = np.asarray(x0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if x0.shape != eps.shape:
        raise ContractError(f"x0 has shape {x0.shape} but eps has shape {eps.shape}")
    return x0, eps


def corrupt(schedule: Schedule, x0, eps, t) -> np.ndarray:
    """x_t = alpha(t) * x0 + sigma(t) * eps, rows paired with t when t is an array."""
    x0, eps = check_pair(x0, eps)
    alpha, sigma = schedule.alpha_sigma(t)
    return broadcast_coefficient(alpha, x0) * x0 + broadcast_coefficient(sigma, eps) * eps
