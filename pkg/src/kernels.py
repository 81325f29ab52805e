"""
Both search engines see an instance through ``ConstraintTables``: every
constraint's forbidden tuples as a dense 0/1 table indexed by tuple code
(first scope position most significant), laid end to end in one array.

    scopes[ci, j]     j-th variable of constraint ci (-1 past its arity)
    offsets[ci]       start of constraint ci's table in ``tables``
    tables[off + c]   1 when tuple code c is forbidden

Domains are an (n, d) 0/1 mask with per-variable sizes.
"""

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

sys.path.insert(0, str(Path(__file__).parent.parent))
from src.generator import encode_tuple


@dataclass(frozen=True)
class ConstraintTables:
    arity: np.ndarray
    scopes: np.ndarray
    offsets: np.ndarray
    tables: np.ndarray

    @property
    def max_arity(self):
        return self.scopes.shape[1]


def compile_tables(inst):
    m, d = inst.m, inst.d
    arity = np.array([c.arity for c in inst.constraints], dtype=np.int64)
    max_arity = int(arity.max()) if m else 1
    scopes = np.full((m, max_arity), -1, dtype=np.int64)
    offsets = np.zeros(m + 1, dtype=np.int64)
    for ci, c in enumerate(inst.constraints):
        scopes[ci, :c.arity] = c.scope
        offsets[ci + 1] = offsets[ci] + d ** c.arity
    tables = np.zeros(int(offsets[-1]), dtype=np.uint8)
    for ci, c in enumerate(inst.constraints):
        if c.forbidden:
            codes = np.array([encode_tuple(t, d) for t in c.forbidden], dtype=np.int64)
            tables[offsets[ci] + codes] = 1
    return ConstraintTables(arity=arity, scopes=scopes, offsets=offsets, tables=tables)


@njit(cache=True)
def _code(ci, scopes, arity, values, v1, x1, v2, x2, d):
    # tuple code of constraint ci under values, with v1 := x1 and v2 := x2
    code = 0
    for j in range(arity[ci]):
        u = scopes[ci, j]
        if u == v1:
            x = x1
        elif u == v2:
            x = x2
        else:
            x = values[u]
        code = code * d + x
    return code


# local search

@njit(cache=True)
def fill_scores(scopes, arity, offsets, tables, weights, values, score, conflicts, violated, d):
    """Recount both score tables and the violation flags; returns the violation count."""
    score[:, :] = 0
    conflicts[:, :] = 0
    count = 0
    for ci in range(scopes.shape[0]):
        base = offsets[ci]
        w = weights[ci]
        for j in range(arity[ci]):
            u = scopes[ci, j]
            for b in range(d):
                if tables[base + _code(ci, scopes, arity, values, u, b, -1, 0, d)]:
                    score[u, b] += w
                    conflicts[u, b] += 1
        if tables[base + _code(ci, scopes, arity, values, -1, 0, -1, 0, d)]:
            violated[ci] = 1
            count += 1
        else:
            violated[ci] = 0
    return count


@njit(cache=True)
def flip(var, new, incident, scopes, arity, offsets, tables, weights, values, score, conflicts,
         violated, d):
    """Set values[var] = new, updating the tables of var's neighbours; returns the violation delta."""
    old = values[var]
    change = 0
    for i in range(incident.shape[0]):
        ci = incident[i]
        base = offsets[ci]
        w = weights[ci]
        for j in range(arity[ci]):
            u = scopes[ci, j]
            if u == var:
                continue
            for b in range(d):
                before = np.int64(tables[base + _code(ci, scopes, arity, values, var, old, u, b, d)])
                after = np.int64(tables[base + _code(ci, scopes, arity, values, var, new, u, b, d)])
                if after != before:
                    score[u, b] += (after - before) * w
                    conflicts[u, b] += after - before
        now = tables[base + _code(ci, scopes, arity, values, var, new, -1, 0, d)]
        if now != violated[ci]:
            change += 1 if now else -1
            violated[ci] = now
    values[var] = new
    return change


@njit(cache=True)
def bump_violated(scopes, arity, offsets, tables, weights, values, score, violated, d):
    for ci in range(violated.shape[0]):
        if not violated[ci]:
            continue
        weights[ci] += 1
        base = offsets[ci]
        for j in range(arity[ci]):
            u = scopes[ci, j]
            for b in range(d):
                if tables[base + _code(ci, scopes, arity, values, u, b, -1, 0, d)]:
                    score[u, b] += 1


# arc consistency

@njit(cache=True)
def _has_support(ci, pos, value, scopes, arity, offsets, tables, mask, residues, d):
    k = arity[ci]
    res = residues[ci, pos, value]
    if res[0] >= 0:
        valid = True
        for j in range(k):
            if not mask[scopes[ci, j], res[j]]:
                valid = False
                break
        if valid:
            return True

    # odometer over the other domains, last position fastest
    idx = np.empty(k, dtype=np.int64)
    for j in range(k):
        if j == pos:
            idx[j] = value
            continue
        u = scopes[ci, j]
        x = 0
        while x < d and not mask[u, x]:
            x += 1
        if x == d:
            return False
        idx[j] = x
    base = offsets[ci]
    while True:
        code = 0
        for j in range(k):
            code = code * d + idx[j]
        if not tables[base + code]:
            for j in range(k):
                res[j] = idx[j]
            return True
        j = k - 1
        while j >= 0:
            if j == pos:
                j -= 1
                continue
            u = scopes[ci, j]
            x = idx[j] + 1
            while x < d and not mask[u, x]:
                x += 1
            if x < d:
                idx[j] = x
                break
            x = 0
            while not mask[u, x]:
                x += 1
            idx[j] = x
            j -= 1
        if j < 0:
            return False


@njit(cache=True)
def revise(ci, scopes, arity, offsets, tables, mask, sizes, residues, d, removed):
    """
    Remove the unsupported values of constraint ci's variables, position
    by position. Removed (var, value) pairs go to ``removed``.

    Returns:
        (removed count, True when a domain was wiped out)
    """
    count = 0
    for pos in range(arity[ci]):
        var = scopes[ci, pos]
        start = count
        for a in range(d):
            if mask[var, a] and not _has_support(ci, pos, a, scopes, arity, offsets, tables,
                                                 mask, residues, d):
                removed[count, 0] = var
                removed[count, 1] = a
                count += 1
        for i in range(start, count):
            mask[var, removed[i, 1]] = 0
        sizes[var] -= count - start
        if sizes[var] == 0:
            return count, True
    return count, False
