"""
Complete Search (MAC)
=====================
Backtracking search that maintains generalized arc consistency (GAC) on
forbidden-tuple tables, with a conflict-directed variable ordering.

Search:
    - d-way branching on x = a; after x = a fails the value is refuted
      (removed from D(x)) and GAC is re-established before the next value.
    - Variable order: min |D(x)| / wdeg(x). wdeg(x) sums the weights of the
      constraints on x that still involve another unassigned variable; a
      constraint's weight starts at 1 and grows by 1 each time its revision
      wipes out a domain.
    - Value order: ascending, or a seeded uniform shuffle when randomized.
      Ties in the variable order go to the smallest index, or to a seeded
      random pick when randomized.

Counters:
    nodes       variable assignments attempted
    backtracks  assignments retracted after their subtree failed

GAC revision looks for a support of each value: first the residual support
found last time, then a scan of the Cartesian product of the other
domains. The scan stops at the first tuple that is not forbidden, so it
costs at most (forbidden tuples with that value) + 1 steps. Revision runs
as a compiled kernel over dense tables (src.kernels).
"""

import logging
import sys
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))
from config.settings import BRUTE_FORCE_CHUNK, BRUTE_FORCE_LIMIT
from src.core import (
    Assignment,
    BruteForceLimitError,
    Instance,
    InvalidArgumentError,
    SolveOutcome,
    Status,
    UINT64_LIMIT,
    satisfies,
)
from src.generator import derive_sub_seeds, encode_tuple, make_rng
from src.kernels import compile_tables, revise

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    node_limit: Optional[int] = None
    backtrack_limit: Optional[int] = None
    time_limit: Optional[float] = None
    randomized: bool = False
    tie_seed: int = 0
    count_all: bool = False

    def __post_init__(self):
        for name in ("node_limit", "backtrack_limit", "time_limit"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise InvalidArgumentError(f"{name} must be positive when set, got {value}")
        if not 0 <= self.tie_seed < UINT64_LIMIT:
            raise InvalidArgumentError(f"tie_seed must be a 64-bit unsigned integer, got {self.tie_seed}")


class WeightTable:
    """Per-constraint conflict weights; start at 1, never decrease."""

    def __init__(self, m):
        self._weights = [1] * m

    def __getitem__(self, idx):
        return self._weights[idx]

    def __len__(self):
        return len(self._weights)

    def bump(self, idx):
        self._weights[idx] += 1

    def as_list(self):
        return list(self._weights)


class _LimitReached(Exception):
    pass


class MacSearch:
    """One MAC search; owns all mutable state (domains, trail, weights)."""

    def __init__(self, inst, cfg):
        self.inst = inst
        self.cfg = cfg
        self.n, self.d = inst.n, inst.d
        self.scopes = [c.scope for c in inst.constraints]
        # constraints with an empty table can never prune anything
        self.incident = [
            [ci for ci in cis if inst.constraints[ci].forbidden] for cis in inst.constraints_of()
        ]
        self.tables = compile_tables(inst)
        self.weights = WeightTable(inst.m)
        self.mask = np.ones((inst.n, inst.d), dtype=np.uint8)
        self.sizes = np.full(inst.n, inst.d, dtype=np.int64)
        self.assigned = [False] * inst.n
        self.trail = []
        k = self.tables.max_arity
        self.residues = np.full((inst.m, k, inst.d, k), -1, dtype=np.int64)
        self._removed = np.empty((k * inst.d, 2), dtype=np.int64)
        self.rng = make_rng(cfg.tie_seed) if cfg.randomized else None

        self.nodes = 0
        self.backtracks = 0
        self.solutions = 0
        self.witness = None
        self._deadline = None

    @property
    def domains(self):
        return [set(np.flatnonzero(row).tolist()) for row in self.mask]

    def _values(self, var):
        return np.flatnonzero(self.mask[var]).tolist()

    # trail

    def _remove(self, var, value):
        self.mask[var, value] = 0
        self.sizes[var] -= 1
        self.trail.append((var, value))

    def _undo(self, mark):
        trail, mask, sizes = self.trail, self.mask, self.sizes
        while len(trail) > mark:
            var, value = trail.pop()
            mask[var, value] = 1
            sizes[var] += 1

    # propagation

    def _revise(self, ci):
        """Prune unsupported values of constraint ``ci``; None on wipeout."""
        t = self.tables
        count, wiped = revise(ci, t.scopes, t.arity, t.offsets, t.tables, self.mask, self.sizes,
                              self.residues, self.d, self._removed)
        changed = []
        for var, value in self._removed[:count].tolist():
            self.trail.append((var, value))
            if not changed or changed[-1] != var:
                changed.append(var)
        if wiped:
            self.weights.bump(ci)
            return None
        return changed

    def _propagate(self, constraints):
        queue = deque(constraints)
        queued = set(queue)
        while queue:
            ci = queue.popleft()
            queued.discard(ci)
            changed = self._revise(ci)
            if changed is None:
                return False
            for var in changed:
                for cj in self.incident[var]:
                    if cj not in queued:
                        queued.add(cj)
                        queue.append(cj)
        return True

    # heuristics

    def _wdeg(self, var):
        total = 0
        assigned = self.assigned
        for ci in self.incident[var]:
            if any(u != var and not assigned[u] for u in self.scopes[ci]):
                total += self.weights[ci]
        return total

    def _select_variable(self):
        best_key = None
        ties = []
        sizes = self.sizes.tolist()
        for v in range(self.n):
            if self.assigned[v] or sizes[v] == 1:
                continue
            w = self._wdeg(v)
            # unconstrained variables go last
            key = (0, sizes[v] / w) if w > 0 else (1, sizes[v])
            if best_key is None or key < best_key:
                best_key = key
                ties = [v]
            elif key == best_key:
                ties.append(v)
        if not ties:
            return None
        if self.rng is not None and len(ties) > 1:
            return ties[int(self.rng.integers(len(ties)))]
        return ties[0]

    def _value_order(self, var):
        values = self._values(var)
        if self.rng is not None:
            values = [values[i] for i in self.rng.permutation(len(values))]
        return values

    # search

    def _check_limits(self):
        cfg = self.cfg
        if cfg.node_limit is not None and self.nodes >= cfg.node_limit:
            raise _LimitReached
        if cfg.backtrack_limit is not None and self.backtracks >= cfg.backtrack_limit:
            raise _LimitReached
        if self._deadline is not None and time.perf_counter() >= self._deadline:
            raise _LimitReached

    def _record_solution(self):
        values = Assignment(self.mask.argmax(axis=1).tolist())
        if self.witness is None:
            if not satisfies(self.inst, values):
                raise AssertionError("GAC fixpoint with singleton domains is not a solution")
            self.witness = values
        self.solutions += 1

    def _search(self):
        """Returns True when the search should stop (solution found, not counting)."""
        var = self._select_variable()
        if var is None:
            self._record_solution()
            return not self.cfg.count_all

        level_mark = len(self.trail)
        self.assigned[var] = True
        mask = self.mask
        for a in self._value_order(var):
            if not mask[var, a]:
                continue
            self._check_limits()
            self.nodes += 1
            found_before = self.solutions
            mark = len(self.trail)
            for b in self._values(var):
                if b != a:
                    self._remove(var, b)
            if self._propagate(self.incident[var]) and self._search():
                return True
            self._undo(mark)
            if self.solutions == found_before:
                self.backtracks += 1
            self._remove(var, a)
            if not self.sizes[var] or not self._propagate(self.incident[var]):
                break
        self._undo(level_mark)
        self.assigned[var] = False
        return False

    def run(self):
        start = time.perf_counter()
        if self.cfg.time_limit is not None:
            self._deadline = start + self.cfg.time_limit
        timed_out = False
        try:
            if self._propagate(range(len(self.scopes))):
                self._search()
        except _LimitReached:
            timed_out = True
        elapsed = time.perf_counter() - start

        if timed_out:
            status = Status.TIMEOUT
        elif self.solutions > 0:
            status = Status.SAT
        else:
            status = Status.UNSAT
        logger.debug("mac %s nodes=%d backtracks=%d solutions=%d elapsed=%.3fs",
                     status.value, self.nodes, self.backtracks, self.solutions, elapsed)
        return SolveOutcome(
            status=status,
            witness=self.witness,
            nodes=self.nodes,
            backtracks=self.backtracks,
            elapsed=elapsed,
            solutions=self.solutions if self.cfg.count_all and not timed_out else None,
        )


def solve_mac(inst, cfg=None):
    """
    Decide ``inst`` with MAC.

    Returns SAT with a verified witness, UNSAT, or TIMEOUT when a limit
    in ``cfg`` is hit. With cfg.count_all the whole space is explored and
    ``solutions`` holds the exact count (witness = first solution found).
    """
    if not isinstance(inst, Instance):
        raise InvalidArgumentError(f"expected an Instance, got {type(inst).__name__}")
    cfg = cfg or SearchConfig()
    return MacSearch(inst, cfg).run()


def _solve_with_seed(args):
    inst, cfg, seed = args
    return solve_mac(inst, replace(cfg, tie_seed=seed))


def survival_outcomes(inst, runs, cfg, workers=1):
    if not cfg.randomized:
        raise InvalidArgumentError("survival runs need a randomized search configuration")
    if runs < 1:
        raise InvalidArgumentError(f"runs must be >= 1, got {runs}")
    jobs = [(inst, cfg, s) for s in derive_sub_seeds(cfg.tie_seed, runs)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_solve_with_seed, jobs))
    return [_solve_with_seed(job) for job in jobs]


def survival_runs(inst, runs, cfg, workers=1):
    """
    Backtrack counts of ``runs`` independently seeded randomized searches.

    Run i is seeded from (cfg.tie_seed, i); output is in run order. Runs cut
    off by a limit report the backtracks reached at the cutoff.
    """
    return [o.backtracks for o in survival_outcomes(inst, runs, cfg, workers)]


def survival_function(counts, xs):
    """S(x) = fraction of runs with more than x backtracks."""
    counts = np.asarray(counts)
    return [float(np.mean(counts > x)) for x in xs]


def brute_force(inst, limit=BRUTE_FORCE_LIMIT, chunk=BRUTE_FORCE_CHUNK):
    """
    Count satisfying assignments by exhaustive enumeration.

    Assignments are enumerated in lexicographic order, decoded in chunks,
    and checked against every table with numpy.

    Raises:
        BruteForceLimitError: d^n exceeds ``limit``
    """
    n, d = inst.n, inst.d
    total = d ** n
    if total > limit:
        raise BruteForceLimitError(f"d^n = {d}^{n} exceeds the enumeration limit {limit}")

    place = np.array([d ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    tables = []
    for c in inst.constraints:
        if not c.forbidden:
            continue
        k = len(c.scope)
        radix = np.array([d ** (k - 1 - j) for j in range(k)], dtype=np.int64)
        codes = np.array(sorted(encode_tuple(t, d) for t in c.forbidden), dtype=np.int64)
        tables.append((list(c.scope), radix, codes))

    count = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // place[None, :]) % d
        ok = np.ones(len(idx), dtype=bool)
        for scope, radix, codes in tables:
            ok &= ~np.isin(digits[:, scope] @ radix, codes)
        count += int(np.count_nonzero(ok))
    return (Status.SAT if count else Status.UNSAT), count
