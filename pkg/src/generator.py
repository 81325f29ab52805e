"""
Random Instance Generator
=========================
Builds Model RB and Model RD instances, unforced or forced, as a pure
function of (params, seed).

Sampling scheme:
    - Scopes: uniform k-subsets of the variables via a partial Fisher-Yates
      shuffle, sorted ascending. Drawn independently per constraint, so
      scopes (and whole constraints) may repeat.
    - RB relations: a uniform subset of exactly round(p * d^k) tuples, drawn
      by a sparse partial Fisher-Yates over the tuple codes [0, d^k). Memory
      stays O(t); the d^k tuples are never materialized.
    - RD relations: one independent Bernoulli(p) coin per tuple.
    - Forced mode: a uniform assignment t is drawn first; every relation is
      then drawn from the same distribution restricted to tuples other than
      the projection of t on the scope.

A tuple is coded as an integer by mixed radix d, first scope position most
significant.

RNG: numpy.random.Generator(PCG64(seed)). Sub-seeds come from
numpy.random.SeedSequence with explicit spawn keys, so a batch does not
depend on the order its members are produced in.
"""

import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))
from src.core import (
    Assignment,
    Constraint,
    DerivedDims,
    InfeasibleForcingError,
    Instance,
    InstanceParams,
    InvalidArgumentError,
    Model,
    UnsupportedParametersError,
    round_half_up,
    satisfies,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratedInstance:
    """
    An instance together with where it came from.

    ``params`` is None only for instances read from files without a
    metadata line; generated instances always carry their params.
    """

    params: Optional[InstanceParams]
    dims: DerivedDims
    instance: Instance
    forced_solution: Optional[Assignment] = None


def derive_dims(params):
    """d = round-half-up(n^alpha), m = round-half-up(r * n * ln n)."""
    d = round_half_up(params.n ** params.alpha)
    if d < 2:
        raise UnsupportedParametersError(
            f"domain size round(n^alpha) = {d} < 2 for n={params.n}, alpha={params.alpha}"
        )
    m = round_half_up(params.r * params.n * math.log(params.n))
    return DerivedDims(d=d, m=m)


def tightness_count(p, d, k):
    """Number of forbidden tuples per RB constraint."""
    return round_half_up(p * d ** k)


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def derive_sub_seeds(seed, count, prefix=()):
    """
    ``count`` independent 64-bit seeds derived from ``seed``.

    Seed j is a function of (seed, prefix + (j,)) only.
    """
    seeds = []
    for j in range(count):
        ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(prefix) + (j,))
        seeds.append(int(ss.generate_state(1, dtype=np.uint64)[0]))
    return seeds


def encode_tuple(values, d):
    code = 0
    for x in values:
        code = code * d + x
    return code


def decode_tuple(code, d, k):
    out = [0] * k
    for i in range(k - 1, -1, -1):
        code, out[i] = divmod(code, d)
    return tuple(out)


def sample_codes(rng, population, count):
    """
    Uniform ``count``-subset of range(population), in draw order.

    Sparse partial Fisher-Yates: only displaced slots are kept in a dict.
    """
    if count > population:
        raise InvalidArgumentError(f"cannot draw {count} items from {population}")
    if count == 0:
        return []
    targets = rng.integers(np.arange(count), population)
    displaced = {}
    picked = []
    for i, j in enumerate(targets.tolist()):
        vi = displaced.get(i, i)
        vj = displaced.get(j, j)
        displaced[j] = vi
        displaced[i] = vj
        picked.append(vj)
    return picked


def sample_scope(rng, n, k):
    return tuple(sorted(sample_codes(rng, n, k)))


def _rb_codes(rng, d, k, count, excluded):
    space = d ** k
    if excluded is None:
        return sample_codes(rng, space, count)
    # draw from [0, space - 1) and step over the excluded code
    return [c + 1 if c >= excluded else c for c in sample_codes(rng, space - 1, count)]


def _rd_codes(rng, d, k, p, excluded):
    coins = rng.random(d ** k) < p
    if excluded is not None:
        coins[excluded] = False
    return np.flatnonzero(coins).tolist()


def generate(params):
    """
    Draw one instance of RB(k, n, alpha, r, p) or its RD variant.

    Raises:
        UnsupportedParametersError: derived d < 2
        InfeasibleForcingError: forced RB where every tuple must be forbidden
    """
    dims = derive_dims(params)
    d, m, k, n = dims.d, dims.m, params.k, params.n
    space = d ** k

    t = None
    if params.model is Model.RB:
        t = tightness_count(params.p, d, k)
        limit = space - 1 if params.forced else space
        if t > limit:
            if params.forced:
                raise InfeasibleForcingError(
                    f"forced RB needs round(p*d^k) <= d^k - 1, got {t} of {space}"
                )
            raise UnsupportedParametersError(f"round(p*d^k) = {t} exceeds d^k = {space}")

    rng = make_rng(params.seed)
    forced_solution = None
    if params.forced:
        forced_solution = Assignment(rng.integers(0, d, size=n).tolist())

    constraints = []
    for _ in range(m):
        scope = sample_scope(rng, n, k)
        excluded = None
        if forced_solution is not None:
            excluded = encode_tuple((forced_solution[v] for v in scope), d)
        if params.model is Model.RB:
            codes = _rb_codes(rng, d, k, t, excluded)
        else:
            codes = _rd_codes(rng, d, k, params.p, excluded)
        constraints.append(Constraint(scope, [decode_tuple(c, d, k) for c in codes]))

    instance = Instance(n=n, d=d, constraints=constraints)
    if forced_solution is not None and not satisfies(instance, forced_solution):
        raise AssertionError("forced solution violated by its own instance")
    logger.debug("generated %s k=%d n=%d d=%d m=%d forced=%s seed=%d",
                 params.model.value, k, n, d, m, params.forced, params.seed)
    return GeneratedInstance(params=params, dims=dims, instance=instance,
                             forced_solution=forced_solution)


def _generate_with_seed(args):
    params, seed = args
    return generate(replace(params, seed=seed))


def sample_batch(params, count, seed, workers=1):
    """
    ``count`` instances from independent sub-seeds of ``seed``.

    Output order is batch index order regardless of ``workers``.
    """
    if count < 1:
        raise InvalidArgumentError(f"count must be >= 1, got {count}")
    jobs = [(params, s) for s in derive_sub_seeds(seed, count)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_generate_with_seed, jobs))
    return [_generate_with_seed(job) for job in jobs]
