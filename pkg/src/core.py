"""
Core Domain Model
=================
Parameters, instances, assignments and solver outcomes shared by every
other module, plus the package's error hierarchy.

All types are frozen dataclasses: they are built once and only read
afterwards, so they can be handed to worker processes or shared between
threads without copying.

Conventions:
    - Domains are the integer range [0, d) for every variable.
    - Scopes are strictly increasing tuples of variable indices; the values
      of a forbidden tuple line up with the sorted scope.
    - Forbidden tuples are stored sorted, which makes serialization and
      test fixtures deterministic.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

UINT64_LIMIT = 1 << 64


class RBCSPError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(RBCSPError, ValueError):
    pass


class UnsupportedParametersError(RBCSPError, ValueError):
    pass


class InfeasibleForcingError(RBCSPError, ValueError):
    pass


class BruteForceLimitError(RBCSPError):
    pass


class ThresholdBracketError(RBCSPError):
    pass


class ConfigError(RBCSPError):
    pass


class InstanceFormatError(RBCSPError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class DecodeError(RBCSPError):
    def __init__(self, variable, message):
        self.variable = variable
        super().__init__(f"variable {variable}: {message}")


class Model(str, Enum):
    RB = "RB"
    RD = "RD"


class Status(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"


def round_half_up(x):
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class InstanceParams:
    """
    Parameters of one RB/RD instance class, plus the seed of one draw.

    Attributes:
        k: constraint arity (>= 2)
        n: number of variables (>= k)
        alpha: domain growth exponent, d = n^alpha
        r: constraint density, m = r * n * ln n
        p: tightness; a proportion (RB) or a per-tuple probability (RD)
        model: Model.RB or Model.RD
        forced: draw a hidden solution first and keep it satisfied
        seed: 64-bit unsigned RNG seed
    """

    k: int
    n: int
    alpha: float
    r: float
    p: float
    model: Model = Model.RB
    forced: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.k < 2:
            raise InvalidArgumentError(f"arity k must be >= 2, got {self.k}")
        if self.n < self.k:
            raise InvalidArgumentError(f"n must be >= k, got n={self.n}, k={self.k}")
        if not self.alpha > 0:
            raise InvalidArgumentError(f"alpha must be > 0, got {self.alpha}")
        if not self.r > 0:
            raise InvalidArgumentError(f"r must be > 0, got {self.r}")
        if not 0 < self.p < 1:
            raise InvalidArgumentError(f"p must lie in (0, 1), got {self.p}")
        if not 0 <= self.seed < UINT64_LIMIT:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        d = round_half_up(self.n ** self.alpha)
        if d < 2:
            raise UnsupportedParametersError(
                f"domain size round(n^alpha) = {d} < 2 for n={self.n}, alpha={self.alpha}"
            )


@dataclass(frozen=True)
class DerivedDims:
    d: int
    m: int


@dataclass(frozen=True)
class Constraint:
    """A table constraint given by its forbidden tuples."""

    scope: tuple
    forbidden: tuple
    forbidden_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(int(v) for v in self.scope))
        tuples = tuple(sorted(tuple(int(x) for x in t) for t in self.forbidden))
        object.__setattr__(self, "forbidden", tuples)
        object.__setattr__(self, "forbidden_set", frozenset(tuples))

    @property
    def arity(self):
        return len(self.scope)

    def allows(self, values):
        return tuple(values[v] for v in self.scope) not in self.forbidden_set


@dataclass(frozen=True)
class Instance:
    """
    n variables over [0, d) and an ordered list of table constraints.

    Constraints may repeat, including identical scope and relation.
    """

    n: int
    d: int
    constraints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.n < 1:
            raise InvalidArgumentError(f"instance needs at least one variable, got n={self.n}")
        if self.d < 1:
            raise InvalidArgumentError(f"domain size must be >= 1, got d={self.d}")
        for idx, c in enumerate(self.constraints):
            scope = c.scope
            if len(scope) == 0:
                raise InvalidArgumentError(f"constraint {idx} has an empty scope")
            if any(b <= a for a, b in zip(scope, scope[1:])):
                raise InvalidArgumentError(f"constraint {idx} scope {scope} is not strictly increasing")
            if scope[0] < 0 or scope[-1] >= self.n:
                raise InvalidArgumentError(f"constraint {idx} scope {scope} out of range [0, {self.n})")
            if len(c.forbidden_set) != len(c.forbidden):
                raise InvalidArgumentError(f"constraint {idx} repeats a forbidden tuple")
            for t in c.forbidden:
                if len(t) != len(scope) or any(not 0 <= x < self.d for x in t):
                    raise InvalidArgumentError(
                        f"constraint {idx} forbidden tuple {t} invalid for arity {len(scope)}, d={self.d}"
                    )

    @property
    def m(self):
        return len(self.constraints)

    @property
    def k(self):
        """Common arity, or 0 for an instance without constraints."""
        arities = {c.arity for c in self.constraints}
        if not arities:
            return 0
        if len(arities) > 1:
            raise InvalidArgumentError(f"mixed arities {sorted(arities)}")
        return arities.pop()

    def constraints_of(self):
        """Map each variable to the indices of the constraints it appears in."""
        incident = [[] for _ in range(self.n)]
        for idx, c in enumerate(self.constraints):
            for v in c.scope:
                incident[v].append(idx)
        return incident


@dataclass(frozen=True)
class Assignment:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(x) for x in self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True)
class SolveOutcome:
    """
    Verdict and effort counters of one solver run.

    ``solutions`` is only set by a complete search run with count_all.
    ``elapsed`` is wall-clock seconds and is the only non-deterministic field.
    """

    status: Status
    witness: Optional[Assignment] = None
    nodes: int = 0
    backtracks: int = 0
    flips: int = 0
    elapsed: float = 0.0
    solutions: Optional[int] = None

    @property
    def is_sat(self):
        return self.status is Status.SAT


def _check_assignment(inst, a):
    if len(a) != inst.n:
        raise InvalidArgumentError(
            f"assignment has {len(a)} values but the instance has {inst.n} variables"
        )
    if any(not 0 <= x < inst.d for x in a.values):
        raise InvalidArgumentError(f"assignment values must lie in [0, {inst.d})")


def satisfies(inst, a):
    """True iff no constraint forbids the projection of ``a`` onto its scope."""
    _check_assignment(inst, a)
    values = a.values
    return all(c.allows(values) for c in inst.constraints)


def violated_constraints(inst, a):
    _check_assignment(inst, a)
    values = a.values
    return [idx for idx, c in enumerate(inst.constraints) if not c.allows(values)]


def distance(a, b):
    """Proportion of variables assigned different values in ``a`` and ``b``."""
    if len(a) != len(b):
        raise InvalidArgumentError(f"assignments differ in length: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise InvalidArgumentError("distance is undefined for empty assignments")
    diff = np.count_nonzero(np.asarray(a.values) != np.asarray(b.values))
    return int(diff) / len(a)
