"""
Incomplete Search (Tabu)
========================
Local search over total assignments. A move changes the value of one
variable that appears in a violated constraint and is chosen to minimize
the weighted number of violated constraints.

    - Tabu attribute: the (variable, old value) pair left by a move stays
      tabu for ``tabu_tenure`` steps, unless taking it would reach fewer
      violated constraints than the best seen in the current segment.
    - Weight learning: at a local minimum (no improving move) the weight of
      every violated constraint grows by 1 before the move is made.
    - Restarts: the flip budget is split into ``restarts`` segments, each
      starting from a fresh random assignment; weights carry over.

Never reports UNSAT: an exhausted budget yields TIMEOUT.

Score tables are maintained incrementally by the kernels in src.kernels:
    score[v][b]      weighted count of v's constraints violated if v := b
    conflicts[v][b]  same, unweighted
"""

import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))
from config.settings import (
    DEFAULT_MAX_FLIPS,
    DEFAULT_TABU_RESTARTS,
    DEFAULT_TABU_TENURE,
    TABU_SELF_CHECK_EVERY,
)
from src.core import (
    Assignment,
    Instance,
    InvalidArgumentError,
    SolveOutcome,
    Status,
    UINT64_LIMIT,
    satisfies,
)
from src.generator import make_rng
from src.kernels import bump_violated, compile_tables, fill_scores, flip

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TabuConfig:
    max_flips: int = DEFAULT_MAX_FLIPS
    tabu_tenure: int = DEFAULT_TABU_TENURE
    restarts: int = DEFAULT_TABU_RESTARTS
    seed: int = 0
    weight_learning: bool = True
    time_limit: Optional[float] = None
    self_check: bool = False

    def __post_init__(self):
        if self.max_flips < 1:
            raise InvalidArgumentError(f"max_flips must be >= 1, got {self.max_flips}")
        if self.tabu_tenure < 0:
            raise InvalidArgumentError(f"tabu_tenure must be >= 0, got {self.tabu_tenure}")
        if self.restarts < 1:
            raise InvalidArgumentError(f"restarts must be >= 1, got {self.restarts}")
        if self.time_limit is not None and not self.time_limit > 0:
            raise InvalidArgumentError(f"time_limit must be positive when set, got {self.time_limit}")
        if not 0 <= self.seed < UINT64_LIMIT:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


class TabuSearch:
    def __init__(self, inst, cfg):
        self.inst = inst
        self.cfg = cfg
        self.n, self.d = inst.n, inst.d
        self.scopes = [c.scope for c in inst.constraints]
        self.forbidden = [c.forbidden_set for c in inst.constraints]
        self.incident = [[ci for ci in cis if self.forbidden[ci]] for cis in inst.constraints_of()]
        self.tables = compile_tables(inst)
        self._incident_arrays = [np.array(cis, dtype=np.int64) for cis in self.incident]
        self.weights = np.ones(inst.m, dtype=np.int64)
        self.rng = make_rng(cfg.seed)
        self.flips = 0

    def _projection(self, ci, var=None, value=None):
        values = self.values
        return tuple(value if u == var else int(values[u]) for u in self.scopes[ci])

    def _reset(self):
        n, d = self.n, self.d
        t = self.tables
        self.values = self.rng.integers(0, d, size=n).astype(np.int64)
        self.score = np.zeros((n, d), dtype=np.int64)
        self.conflicts = np.zeros((n, d), dtype=np.int64)
        self.violated = np.zeros(self.inst.m, dtype=np.uint8)
        self.tabu_until = [[-1] * d for _ in range(n)]
        self.violation_count = fill_scores(t.scopes, t.arity, t.offsets, t.tables, self.weights,
                                           self.values, self.score, self.conflicts, self.violated, d)
        self.best_violations = self.violation_count

    def _bump_weights(self):
        t = self.tables
        bump_violated(t.scopes, t.arity, t.offsets, t.tables, self.weights, self.values,
                      self.score, self.violated, self.d)

    def _flip(self, var, new):
        t = self.tables
        self.violation_count += flip(var, new, self._incident_arrays[var], t.scopes, t.arity,
                                     t.offsets, t.tables, self.weights, self.values, self.score,
                                     self.conflicts, self.violated, self.d)

    def _candidates(self):
        scopes = self.tables.scopes[np.flatnonzero(self.violated)]
        return np.unique(scopes[scopes >= 0]).tolist()

    def _choose_move(self, step):
        best, best_delta, best_raw = [], None, None
        fallback, fallback_delta = [], None
        current_violations = self.violation_count
        for v in self._candidates():
            cur = int(self.values[v])
            score_v, conflicts_v = self.score[v].tolist(), self.conflicts[v].tolist()
            tabu_v = self.tabu_until[v]
            for b in range(self.d):
                if b == cur:
                    continue
                delta = score_v[b] - score_v[cur]
                raw = conflicts_v[b] - conflicts_v[cur]
                if fallback_delta is None or delta < fallback_delta:
                    fallback, fallback_delta = [(v, b)], delta
                elif delta == fallback_delta:
                    fallback.append((v, b))
                aspiration = current_violations + raw < self.best_violations
                if tabu_v[b] > step and not aspiration:
                    continue
                if best_delta is None or delta < best_delta:
                    best, best_delta, best_raw = [(v, b)], delta, raw
                elif delta == best_delta:
                    best.append((v, b))
        if not best:
            best, best_delta = fallback, fallback_delta
        if not best:
            return None, None
        move = best[int(self.rng.integers(len(best)))] if len(best) > 1 else best[0]
        return move, best_delta

    def _self_check(self):
        values = self.values
        fresh = {ci for ci, forbidden in enumerate(self.forbidden)
                 if tuple(int(values[u]) for u in self.scopes[ci]) in forbidden}
        tracked = set(np.flatnonzero(self.violated).tolist())
        if fresh != tracked or len(tracked) != self.violation_count:
            raise AssertionError(
                f"incremental violation set drifted: {self.violation_count} tracked vs {len(fresh)} actual"
            )

    def run(self):
        cfg = self.cfg
        start = time.perf_counter()
        deadline = start + cfg.time_limit if cfg.time_limit is not None else None
        segment = max(1, cfg.max_flips // cfg.restarts)

        self._reset()
        step = 0
        while self.violation_count and self.flips < cfg.max_flips:
            if deadline is not None and time.perf_counter() >= deadline:
                break
            if self.flips and self.flips % segment == 0 and step > 0:
                logger.debug("tabu restart after %d flips", self.flips)
                self._reset()
                step = 0
                if not self.violation_count:
                    break
            move, delta = self._choose_move(step)
            if move is None:
                break
            if delta >= 0 and cfg.weight_learning:
                self._bump_weights()
            var, value = move
            old = int(self.values[var])
            self._flip(var, value)
            self.tabu_until[var][old] = step + cfg.tabu_tenure
            self.flips += 1
            step += 1
            self.best_violations = min(self.best_violations, self.violation_count)
            if cfg.self_check and self.flips % TABU_SELF_CHECK_EVERY == 0:
                self._self_check()
        elapsed = time.perf_counter() - start

        if not self.violation_count:
            witness = Assignment(self.values.tolist())
            if not satisfies(self.inst, witness):
                raise AssertionError("tabu reported a non-solution")
            status = Status.SAT
        else:
            witness = None
            status = Status.TIMEOUT
        logger.debug("tabu %s flips=%d elapsed=%.3fs", status.value, self.flips, elapsed)
        return SolveOutcome(status=status, witness=witness, flips=self.flips, elapsed=elapsed)


def solve_tabu(inst, cfg=None):
    """Search for a solution of ``inst`` within the flip budget of ``cfg``."""
    if not isinstance(inst, Instance):
        raise InvalidArgumentError(f"expected an Instance, got {type(inst).__name__}")
    return TabuSearch(inst, cfg or TabuConfig()).run()
