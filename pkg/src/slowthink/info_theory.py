"""Exact information-theoretic verification on finite discrete channels:
entropies, per-step information loss, cumulative (snowball) loss, optimal
decoder error, and the Fano-style lower bound tying them together.

All quantities are in nats. A reasoning step is modelled as a finite joint
distribution p(t, r) between the latent step t and the emitted response r;
a multi-step process is a sequence of such joints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError, ValidationError

MASS_TOL = 1e-12
_HOLD_TOL = 1e-12


def _ent(arr: np.ndarray) -> float:
    nz = arr[arr > 0]
    return float(-(nz * np.log(nz)).sum())


def _validated_dist(dist) -> np.ndarray:
    p = np.asarray(dist, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise ValidationError("distribution must be a nonempty 1-D array")
    if np.any(p < 0):
        raise ValidationError("distribution has negative entries")
    total = float(p.sum())
    if abs(total - 1.0) > MASS_TOL:
        raise ValidationError(f"distribution mass {total} is not 1 within {MASS_TOL}")
    return p / total


@dataclass(frozen=True)
class FiniteJoint:
    """Joint distribution p(t, r) over finite supports, rows indexed by t.

    Entries must be nonnegative and sum to 1 within ``MASS_TOL`` (the mass is
    then renormalized exactly once); both marginals must be strictly positive,
    i.e. zero-probability symbols are removed from the support before
    construction.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 2:
            raise ValidationError("joint must be a 2-D matrix")
        if p.shape[0] < 2 or p.shape[1] < 2:
            raise ValidationError(f"support sizes must be >= 2, got {p.shape}")
        if np.any(p < 0):
            raise ValidationError("joint has negative entries")
        total = float(p.sum())
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"joint mass {total} is not 1 within {MASS_TOL}")
        p = p / total
        if np.any(p.sum(axis=1) <= 0) or np.any(p.sum(axis=0) <= 0):
            raise ValidationError(
                "marginals must be strictly positive; drop zero-probability "
                "symbols from the support"
            )
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def t_support_size(self) -> int:
        return self.probs.shape[0]

    @property
    def r_support_size(self) -> int:
        return self.probs.shape[1]

    def t_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def r_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=0)


@dataclass(frozen=True)
class ChannelSequence:
    """One finite joint per reasoning step, in step order."""

    layers: tuple[FiniteJoint, ...]

    def __post_init__(self) -> None:
        layers = tuple(self.layers)
        if not layers:
            raise ValidationError("sequence must contain at least one layer")
        object.__setattr__(self, "layers", layers)

    def __len__(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class InfoLossReport:
    """Per-layer information-loss inequality check."""

    l: int
    lhs: float  # H(t_l | r_l)
    rhs: float  # mean of earlier per-step losses
    mi_nonincreasing: bool
    entropy_condition: bool  # H(t_l) >= mean of earlier H(t_i)
    holds: bool

    @property
    def assumptions_hold(self) -> bool:
        return self.mi_nonincreasing and self.entropy_condition


@dataclass(frozen=True)
class FanoReport:
    """Decoder-error lower-bound check at one layer.

    ``assumption_holds`` records the mutual-information condition alone;
    ``entropy_condition`` records the companion condition that the current
    step's entropy is at least the mean of the earlier ones. The bound is
    guaranteed only when both hold. ``defined`` is False for binary supports,
    where the bound's denominator log(|T|-1) vanishes.
    """

    l: int
    lhs: float  # exact optimal-decoder error at layer l
    rhs: float  # lower bound
    h_b: float  # binary entropy of the realized error event
    assumption_holds: bool
    entropy_condition: bool
    defined: bool
    holds: bool


def entropy(dist) -> float:
    """Shannon entropy -sum p ln p of a distribution, with 0 ln 0 = 0."""
    return _ent(_validated_dist(dist))


def conditional_entropy(joint: FiniteJoint) -> float:
    """H(t | r): the per-step information loss."""
    v = _ent(joint.probs.ravel()) - _ent(joint.r_marginal())
    return max(v, 0.0)


def mutual_information(joint: FiniteJoint) -> float:
    """I(t; r) = H(t) + H(r) - H(t, r)."""
    v = (
        _ent(joint.t_marginal())
        + _ent(joint.r_marginal())
        - _ent(joint.probs.ravel())
    )
    return max(v, 0.0)


def snowball(seq: ChannelSequence, l: int) -> float:
    """Cumulative information loss before layer l: sum over layers i < l of
    H(t_i | r_i). Defined for 2 <= l <= len(seq) + 1."""
    if not 2 <= l <= len(seq) + 1:
        raise RangeError(f"l must be in 2..{len(seq) + 1}, got {l}")
    return sum(conditional_entropy(seq.layers[i]) for i in range(l - 1))


def map_decoder_error(joint: FiniteJoint) -> float:
    """Error probability of the maximum-a-posteriori decoder t_hat(r), the
    minimum achievable over all decoders: 1 - sum_r max_t p(t, r)."""
    return float(1.0 - joint.probs.max(axis=0).sum())


def binary_entropy(p: float) -> float:
    """Entropy in nats of a Bernoulli(p) indicator."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"probability must be in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * math.log(p) - (1.0 - p) * math.log1p(-p))


def _prefix_conditions(seq: ChannelSequence, l: int) -> tuple[bool, bool]:
    mis = [mutual_information(seq.layers[i]) for i in range(l)]
    mi_noninc = all(mis[i] <= mis[i - 1] for i in range(1, l))
    ents = [_ent(seq.layers[i].t_marginal()) for i in range(l)]
    entropy_cond = ents[l - 1] >= float(np.mean(ents[: l - 1]))
    return mi_noninc, entropy_cond


def check_info_loss_inequality(seq: ChannelSequence, l: int) -> InfoLossReport:
    """Check H(t_l | r_l) >= (sum of earlier losses) / (l - 1) and report the
    two assumptions it rests on separately."""
    if not 2 <= l <= len(seq):
        raise RangeError(f"l must be in 2..{len(seq)}, got {l}")
    mi_noninc, entropy_cond = _prefix_conditions(seq, l)
    lhs = conditional_entropy(seq.layers[l - 1])
    rhs = snowball(seq, l) / (l - 1)
    return InfoLossReport(
        l=l,
        lhs=lhs,
        rhs=rhs,
        mi_nonincreasing=mi_noninc,
        entropy_condition=entropy_cond,
        holds=lhs >= rhs - _HOLD_TOL,
    )


def fano_check(seq: ChannelSequence, l: int) -> FanoReport:
    """Compare the exact optimal-decoder error at layer l against its
    information-theoretic lower bound
    ``[snowball/(l-1) - H_b(error)] / ln(|T_l| - 1)``."""
    if not 2 <= l <= len(seq):
        raise RangeError(f"l must be in 2..{len(seq)}, got {l}")
    layer = seq.layers[l - 1]
    mi_noninc, entropy_cond = _prefix_conditions(seq, l)
    lhs = map_decoder_error(layer)
    if layer.t_support_size == 2:
        return FanoReport(
            l=l,
            lhs=lhs,
            rhs=float("nan"),
            h_b=binary_entropy(lhs),
            assumption_holds=mi_noninc,
            entropy_condition=entropy_cond,
            defined=False,
            holds=True,
        )
    h_b = binary_entropy(lhs)
    rhs = (snowball(seq, l) / (l - 1) - h_b) / math.log(layer.t_support_size - 1)
    return FanoReport(
        l=l,
        lhs=lhs,
        rhs=rhs,
        h_b=h_b,
        assumption_holds=mi_noninc,
        entropy_condition=entropy_cond,
        defined=True,
        holds=lhs >= rhs - _HOLD_TOL,
    )


def random_joint(rng: np.random.Generator, t_size: int, r_size: int) -> FiniteJoint:
    """Dirichlet-uniform draw over the joint simplex, redrawn in the rare case
    a marginal underflows to zero."""
    if t_size < 2 or r_size < 2:
        raise ValidationError(f"support sizes must be >= 2, got {t_size}x{r_size}")
    while True:
        p = rng.dirichlet(np.ones(t_size * r_size)).reshape(t_size, r_size)
        if np.all(p.sum(axis=1) > 0) and np.all(p.sum(axis=0) > 0):
            return FiniteJoint(p)


def random_sequence(
    rng: np.random.Generator,
    length: int,
    support_range: tuple[int, int] = (3, 6),
) -> ChannelSequence:
    """Sequence of independent Dirichlet-uniform layers with support sizes
    drawn uniformly from ``support_range`` (inclusive)."""
    lo, hi = support_range
    if length < 1:
        raise ValidationError(f"length must be >= 1, got {length}")
    layers = []
    for _ in range(length):
        t = int(rng.integers(lo, hi + 1))
        r = int(rng.integers(lo, hi + 1))
        layers.append(random_joint(rng, t, r))
    return ChannelSequence(tuple(layers))


@dataclass(frozen=True)
class FanoSuiteResult:
    """Aggregate outcome of a randomized lower-bound verification run."""

    instances: int
    checks: int
    violations: int
    reports: tuple[tuple[int, FanoReport], ...]  # (sequence index, report)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def fano_suite(
    instances: int,
    support_range: tuple[int, int] = (3, 6),
    max_len: int = 8,
    seed: int = 0,
    require_entropy_condition: bool = True,
    max_attempts_factor: int = 200,
) -> FanoSuiteResult:
    """Generate seeded random channel sequences and verify the decoder-error
    lower bound on every qualifying layer.

    A sequence qualifies when at least one layer l >= 2 has a defined bound
    and satisfies the mutual-information condition (plus, by default, the
    entropy condition; without it the bound is not guaranteed and violations
    are expected). Sequences are drawn until ``instances`` qualify.
    """
    if instances < 1:
        raise ValidationError(f"instances must be >= 1, got {instances}")
    if max_len < 2:
        raise ValidationError(f"max_len must be >= 2, got {max_len}")
    rng = np.random.default_rng(seed)
    kept = 0
    checks = 0
    violations = 0
    rows: list[tuple[int, FanoReport]] = []
    for attempt in range(max_attempts_factor * instances):
        if kept >= instances:
            break
        length = int(rng.integers(2, max_len + 1))
        seq = random_sequence(rng, length, support_range)
        qualifying = []
        for l in range(2, length + 1):
            rep = fano_check(seq, l)
            if not (rep.defined and rep.assumption_holds):
                continue
            if require_entropy_condition and not rep.entropy_condition:
                continue
            qualifying.append(rep)
        if not qualifying:
            continue
        kept += 1
        for rep in qualifying:
            checks += 1
            if not rep.holds:
                violations += 1
            rows.append((attempt, rep))
    if kept < instances:
        raise ValidationError(
            f"only {kept} of {instances} qualifying sequences found; "
            "widen the attempt budget"
        )
    return FanoSuiteResult(
        instances=kept, checks=checks, violations=violations, reports=tuple(rows)
    )
