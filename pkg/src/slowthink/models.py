"""Probabilistic primitives: step-correctness decay laws, selector reliability
models, wrongness decay, and the synthetic answer-label model used by voting
strategies.

All types are immutable after construction and every operation is a pure
function of its inputs, so they are safe to share across threads.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtri

from .errors import RangeError, ValidationError

EXPONENTIAL = "exponential"
TABULATED = "tabulated"

IDEAL = "ideal"
CONSTANT = "constant"
NOISY_SCORE = "noisy_score"

# Internal Monte Carlo resolution for noisy-score selection probabilities.
NOISY_SCORE_SAMPLES = 100_000


@dataclass(frozen=True)
class DecayModel:
    """Per-layer law for the probability of generating a correct step.

    Two variants:

    * ``exponential`` -- ``min(lambda_tau * e**(-l), 1)`` for any depth l >= 1.
    * ``tabulated`` -- an explicit finite sequence of probabilities, defined
      only on indices 1..len(table); no extrapolation.

    ``tau_label`` is a free-form tag recording which correctness threshold the
    model represents.
    """

    kind: str
    lambda_tau: float | None = None
    table: tuple[float, ...] | None = None
    tau_label: str = ""

    def __post_init__(self) -> None:
        if self.kind == EXPONENTIAL:
            if self.lambda_tau is None or not self.lambda_tau > 0:
                raise ValidationError(
                    f"exponential decay requires lambda_tau > 0, got {self.lambda_tau!r}"
                )
            if self.table is not None:
                raise ValidationError("exponential decay does not take a table")
        elif self.kind == TABULATED:
            if self.lambda_tau is not None:
                raise ValidationError("tabulated decay does not take lambda_tau")
            if not self.table:
                raise ValidationError("tabulated decay requires a nonempty table")
            table = tuple(float(v) for v in self.table)
            for i, v in enumerate(table):
                if not 0.0 <= v <= 1.0:
                    raise ValidationError(
                        f"table entry {i + 1} is {v}, outside [0, 1]"
                    )
            object.__setattr__(self, "table", table)
        else:
            raise ValidationError(f"unknown decay kind {self.kind!r}")

    @classmethod
    def exponential(cls, lambda_tau: float, tau_label: str = "") -> "DecayModel":
        return cls(kind=EXPONENTIAL, lambda_tau=float(lambda_tau), tau_label=tau_label)

    @classmethod
    def tabulated(cls, values, tau_label: str = "") -> "DecayModel":
        return cls(kind=TABULATED, table=tuple(values), tau_label=tau_label)

    @classmethod
    def from_config(cls, cfg: dict) -> "DecayModel":
        kind = cfg.get("kind", EXPONENTIAL)
        if kind == EXPONENTIAL:
            return cls.exponential(cfg["lambda_tau"], cfg.get("tau_label", ""))
        if kind == TABULATED:
            return cls.tabulated(cfg["table"], cfg.get("tau_label", ""))
        raise ValidationError(f"unknown decay kind {kind!r}")

    @property
    def depth_limit(self) -> int | None:
        """Largest evaluable layer index, or None when unbounded."""
        return len(self.table) if self.kind == TABULATED else None


@dataclass(frozen=True)
class WrongModel:
    """Rate constant for how quickly candidate steps become detectably wrong
    as depth grows; a step at depth l is wrong beyond the threshold with
    probability ``max(1 - lambda_delta * e**(-l), 0)``.
    """

    lambda_delta: float
    delta_label: str = ""

    def __post_init__(self) -> None:
        if not self.lambda_delta > 0:
            raise ValidationError(
                f"lambda_delta must be > 0, got {self.lambda_delta!r}"
            )

    @classmethod
    def from_config(cls, cfg: dict) -> "WrongModel":
        return cls(float(cfg["lambda_delta"]), cfg.get("delta_label", ""))


@dataclass(frozen=True)
class SelectorModel:
    """Reliability of the value function that picks a correct candidate out of
    a pool, conditional on at least one correct candidate existing.

    * ``ideal`` -- always succeeds, for every pool size.
    * ``constant`` -- succeeds with fixed probability ``epsilon``.
    * ``noisy_score`` -- a correct candidate carries score ``margin`` plus
      Gaussian noise and must outrank pools of purely-noisy competitors, so
      the success probability emerges from the pool size.
    """

    kind: str
    epsilon: float | None = None
    noise_std: float | None = None
    margin: float | None = None

    def __post_init__(self) -> None:
        if self.kind == IDEAL:
            if (self.epsilon, self.noise_std, self.margin) != (None, None, None):
                raise ValidationError("ideal selector takes no parameters")
        elif self.kind == CONSTANT:
            if self.epsilon is None or not 0.0 <= self.epsilon <= 1.0:
                raise ValidationError(
                    f"constant selector requires epsilon in [0, 1], got {self.epsilon!r}"
                )
        elif self.kind == NOISY_SCORE:
            if self.noise_std is None or self.noise_std < 0:
                raise ValidationError(
                    f"noisy-score selector requires noise_std >= 0, got {self.noise_std!r}"
                )
            if self.margin is None or not self.margin > 0:
                raise ValidationError(
                    f"noisy-score selector requires margin > 0, got {self.margin!r}"
                )
        else:
            raise ValidationError(f"unknown selector kind {self.kind!r}")

    @classmethod
    def ideal(cls) -> "SelectorModel":
        return cls(kind=IDEAL)

    @classmethod
    def constant(cls, epsilon: float) -> "SelectorModel":
        return cls(kind=CONSTANT, epsilon=float(epsilon))

    @classmethod
    def noisy_score(cls, margin: float, noise_std: float) -> "SelectorModel":
        return cls(kind=NOISY_SCORE, margin=float(margin), noise_std=float(noise_std))

    @classmethod
    def from_config(cls, cfg: dict) -> "SelectorModel":
        kind = cfg.get("kind", IDEAL)
        if kind == IDEAL:
            return cls.ideal()
        if kind == CONSTANT:
            return cls.constant(cfg["epsilon"])
        if kind == NOISY_SCORE:
            return cls.noisy_score(cfg["margin"], cfg["noise_std"])
        raise ValidationError(f"unknown selector kind {kind!r}")


@dataclass(frozen=True)
class AnswerModel:
    """Final-answer label space for voting strategies: label 0 is the correct
    answer, incorrect paths land uniformly on one of ``answer_space_size``
    wrong labels.
    """

    answer_space_size: int = 1

    def __post_init__(self) -> None:
        if int(self.answer_space_size) < 1:
            raise ValidationError(
                f"answer_space_size must be >= 1, got {self.answer_space_size!r}"
            )
        object.__setattr__(self, "answer_space_size", int(self.answer_space_size))

    @classmethod
    def from_config(cls, cfg: dict) -> "AnswerModel":
        return cls(int(cfg.get("answer_space_size", 1)))


def step_correct_prob(model: DecayModel, l: int) -> float:
    """Probability that the step generated at layer ``l`` is correct, given a
    correct prefix."""
    if l < 1:
        raise RangeError(f"layer index must be >= 1, got {l}")
    if model.kind == EXPONENTIAL:
        return min(model.lambda_tau * math.exp(-l), 1.0)
    if l > len(model.table):
        raise RangeError(
            f"layer {l} outside tabulated range 1..{len(model.table)}"
        )
    return model.table[l - 1]


def validate_decay(model: DecayModel) -> str | None:
    """Return None when the evaluated sequence is nonincreasing over its
    domain, otherwise a description of the first violation."""
    if model.kind == EXPONENTIAL:
        return None
    for i in range(1, len(model.table)):
        if model.table[i] > model.table[i - 1]:
            return (
                f"value increases at index {i + 1}: "
                f"{model.table[i - 1]} -> {model.table[i]}"
            )
    return None


def selector_success_prob(sel: SelectorModel, b: int) -> float:
    """Probability of picking a correct candidate out of ``b``, given at least
    one correct candidate exists."""
    if b < 1:
        raise RangeError(f"candidate count must be >= 1, got {b}")
    if sel.kind == IDEAL:
        return 1.0
    if sel.kind == CONSTANT:
        return sel.epsilon
    return _noisy_score_success(sel.margin, sel.noise_std, int(b))


def _param_seed(*values: float) -> int:
    buf = b"".join(struct.pack("<d", float(v)) for v in values)
    return int.from_bytes(hashlib.sha256(buf).digest()[:8], "little")


@lru_cache(maxsize=4096)
def _noisy_score_success(margin: float, noise_std: float, b: int) -> float:
    """Seeded Monte Carlo estimate of P(margin + s*Z0 > s*max of b-1 iid
    standard normals).

    The competitor maximum is sampled through its quantile transform
    ``Phi^{-1}(U^{1/(b-1)})`` from a single uniform U, which costs O(1) per
    sample for any pool size and, because the same (margin, noise_std)-keyed
    draws are reused for every b, makes the cached estimates exactly
    nonincreasing in b.
    """
    if b == 1 or noise_std == 0.0:
        return 1.0
    rng = np.random.default_rng(_param_seed(margin, noise_std))
    z0 = rng.standard_normal(NOISY_SCORE_SAMPLES)
    u = rng.random(NOISY_SCORE_SAMPLES)
    with np.errstate(divide="ignore"):
        # 1 - U^{1/(b-1)}, kept accurate near 0
        q = -np.expm1(np.log(u) / (b - 1))
    comp_max = -ndtri(q)
    return float(np.mean(margin + noise_std * z0 > noise_std * comp_max))
