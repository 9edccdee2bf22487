"""Parameter types, validation and reproducible random streams."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

QUEUE_CAPACITY = 2


class ParameterError(ValueError):
    """Raised when a parameter violates its documented constraint."""


class Policy(str, Enum):
    NONE = "none"
    A = "A"
    B = "B"

    @classmethod
    def parse(cls, value) -> "Policy":
        if isinstance(value, Policy):
            return value
        if value is None:
            return cls.NONE
        text = str(value).strip()
        for member in cls:
            if text.lower() == member.value.lower():
                return member
        if text.lower() in ("nodeadline", "no", ""):
            return cls.NONE
        raise ParameterError(f"unknown deadline policy {value!r}; expected 'none', 'A' or 'B'")


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class NetworkParams:
    """Spatial and radio parameters of the bipolar network.

    ``theta`` is the linear SIR threshold; use :meth:`from_db` when the
    threshold is quoted in dB.
    """

    lam: float
    r0: float = 1.0
    alpha: float = 4.0
    theta: float = 10.0
    p: float = 0.5

    @classmethod
    def from_db(cls, lam, theta_db, r0=1.0, alpha=4.0, p=0.5) -> "NetworkParams":
        return cls(lam=lam, r0=r0, alpha=alpha, theta=db_to_linear(theta_db), p=p)

    @property
    def theta_db(self) -> float:
        return linear_to_db(self.theta)

    def validate(self) -> "NetworkParams":
        if not self.alpha > 2:
            raise ParameterError(f"alpha must exceed 2 (got {self.alpha})")
        if not 0 < self.p <= 1:
            raise ParameterError(f"p outside (0,1] (got {self.p})")
        if not self.lam >= 0:
            raise ParameterError(f"lambda must be >= 0 (got {self.lam})")
        if not self.theta > 0:
            raise ParameterError(f"theta must be > 0 (got {self.theta})")
        if not self.r0 > 0:
            raise ParameterError(f"r0 must be > 0 (got {self.r0})")
        return self


@dataclass(frozen=True)
class TrafficParams:
    """Arrival process and deadline policy of every transmitter queue."""

    lambda_a: float
    policy: Policy = Policy.NONE
    deadline_d: int | None = None
    queue_capacity: int = field(default=QUEUE_CAPACITY, init=False)

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy.parse(self.policy))

    def validate(self) -> "TrafficParams":
        if not 0 <= self.lambda_a <= 1:
            raise ParameterError(f"lambda_a outside [0,1] (got {self.lambda_a})")
        if self.policy is not Policy.NONE:
            d = self.deadline_d
            if d is None or int(d) != d or d < 1:
                raise ParameterError(
                    f"deadline_d must be a positive integer under policy {self.policy.value} (got {d})")
        return self

    @property
    def d(self) -> int:
        """Deadline in slots; a sentinel larger than any horizon when no deadline applies."""
        if self.policy is Policy.NONE or self.deadline_d is None:
            return 2**62
        return int(self.deadline_d)


@dataclass(frozen=True)
class ValidatedParams:
    net: NetworkParams
    traffic: TrafficParams


def validate_params(net: NetworkParams, traffic: TrafficParams) -> ValidatedParams:
    return ValidatedParams(net.validate(), traffic.validate())


@dataclass(frozen=True)
class RngSpec:
    """Identifies one independent random substream.

    Streams are derived with :class:`numpy.random.SeedSequence`, keyed by the
    master seed and ``stream_id``; the same pair always produces the same
    draws, and different stream ids are statistically independent.
    """

    master_seed: int
    stream_id: int = 0

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(int(self.master_seed) % 2**64, spawn_key=(int(self.stream_id),))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))


def split_stream(spec: RngSpec, n: int) -> list[RngSpec]:
    """Enumerate ``n`` substreams following ``spec``: ids ``stream_id+1 .. stream_id+n``."""
    if n < 1:
        raise ParameterError(f"n must be >= 1 (got {n})")
    return [RngSpec(spec.master_seed, spec.stream_id + k) for k in range(1, n + 1)]


# JSON configuration document ------------------------------------------------

CONFIG_DEFAULTS = {
    "lambda": 0.05,
    "r0": 1.0,
    "alpha": 4.0,
    "theta_db": 10.0,
    "p": 0.5,
    "lambda_a": 0.1,
    "policy": "none",
    "deadline_d": 10,
    "seed": 1,
    "realizations": 1,
    "slots": 100_000,
    "warmup_slots": 1_000,
    "region_radius": 100.0,
}


def network_from_config(cfg: dict) -> NetworkParams:
    return NetworkParams.from_db(
        lam=float(cfg["lambda"]), theta_db=float(cfg["theta_db"]),
        r0=float(cfg["r0"]), alpha=float(cfg["alpha"]), p=float(cfg["p"])).validate()


def traffic_from_config(cfg: dict) -> TrafficParams:
    policy = Policy.parse(cfg.get("policy", "none"))
    d = cfg.get("deadline_d")
    return TrafficParams(float(cfg["lambda_a"]), policy,
                         None if d is None else int(d)).validate()


def load_config(path: str | Path | None = None, **overrides) -> dict:
    """Read a JSON config, fill defaults and apply non-None ``overrides``."""
    cfg = dict(CONFIG_DEFAULTS)
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            cfg.update(json.load(fh))
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    network_from_config(cfg)
    traffic_from_config(cfg)
    return cfg
