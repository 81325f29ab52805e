"""
Instance text format (line oriented, 0-based, whitespace separated):

    RBCSP 1
    n <n> d <d> k <k> m <m>
    meta model <RB|RD> forced <0|1> k <k> n <n> alpha <a> r <r> p <p> seed <s>   (optional)
    solution <x1> ... <xn>                                                      (optional)
    c <v1> ... <vk> <t>
    <x1> ... <xk>            t forbidden tuples, one per line
    ...

Blank lines and lines starting with '#' are ignored. Floats are written
with repr(), which is locale independent and round-trips exactly.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))
from config.settings import CSV_FLOAT_FORMAT, INSTANCE_FORMAT_TAG, INSTANCE_FORMAT_VERSION
from src.core import (
    Assignment,
    Constraint,
    DerivedDims,
    Instance,
    InstanceFormatError,
    InstanceParams,
    InvalidArgumentError,
    Model,
)
from src.generator import GeneratedInstance
from src.sat_encoder import CnfFormula


def format_params(params):
    return (
        f"model {params.model.value} forced {int(params.forced)} k {params.k} n {params.n} "
        f"alpha {params.alpha!r} r {params.r!r} p {params.p!r} seed {params.seed}"
    )


def instance_lines(gi):
    inst = gi.instance
    k = inst.k if inst.m else (gi.params.k if gi.params else 0)
    lines = [
        f"{INSTANCE_FORMAT_TAG} {INSTANCE_FORMAT_VERSION}",
        f"n {inst.n} d {inst.d} k {k} m {inst.m}",
    ]
    if gi.params is not None:
        lines.append("meta " + format_params(gi.params))
    if gi.forced_solution is not None:
        lines.append("solution " + " ".join(map(str, gi.forced_solution.values)))
    for c in inst.constraints:
        lines.append("c " + " ".join(map(str, c.scope)) + f" {len(c.forbidden)}")
        for t in c.forbidden:
            lines.append(" ".join(map(str, t)))
    return lines


def write_instance(gi, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(instance_lines(gi)) + "\n", encoding="utf-8")
    return str(path)


def _ints(tokens, line_no, what):
    try:
        return [int(tok) for tok in tokens]
    except ValueError:
        raise InstanceFormatError(line_no, f"non-integer token in {what}") from None


def _parse_keyed(tokens, line_no, what):
    if len(tokens) % 2:
        raise InstanceFormatError(line_no, f"{what} needs key/value pairs")
    return dict(zip(tokens[::2], tokens[1::2]))


def _parse_meta(tokens, line_no):
    fields = _parse_keyed(tokens, line_no, "meta line")
    try:
        return InstanceParams(
            k=int(fields["k"]),
            n=int(fields["n"]),
            alpha=float(fields["alpha"]),
            r=float(fields["r"]),
            p=float(fields["p"]),
            model=Model(fields["model"]),
            forced=fields["forced"] == "1",
            seed=int(fields["seed"]),
        )
    except KeyError as e:
        raise InstanceFormatError(line_no, f"meta line lacks {e.args[0]!r}") from None
    except ValueError as e:
        raise InstanceFormatError(line_no, f"bad meta line: {e}") from None


def parse_instance(text):
    """Parse instance text into a GeneratedInstance; diagnostics carry line numbers."""
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            rows.append((line_no, stripped.split()))
    end_line = len(text.splitlines()) + 1

    if not rows:
        raise InstanceFormatError(1, "empty file")
    line_no, tokens = rows[0]
    if len(tokens) != 2 or tokens[0] != INSTANCE_FORMAT_TAG:
        raise InstanceFormatError(line_no, f"expected '{INSTANCE_FORMAT_TAG} <version>' header")
    if tokens[1] != str(INSTANCE_FORMAT_VERSION):
        raise InstanceFormatError(
            line_no, f"unsupported version {tokens[1]} (expected {INSTANCE_FORMAT_VERSION})"
        )

    if len(rows) < 2:
        raise InstanceFormatError(end_line, "missing dimensions line")
    line_no, tokens = rows[1]
    dims = _parse_keyed(tokens, line_no, "dimensions line")
    try:
        n, d, k, m = (int(dims[key]) for key in ("n", "d", "k", "m"))
    except (KeyError, ValueError):
        raise InstanceFormatError(line_no, "dimensions line must read 'n <n> d <d> k <k> m <m>'") from None

    pos = 2
    params = None
    forced_solution = None
    if pos < len(rows) and rows[pos][1][0] == "meta":
        params = _parse_meta(rows[pos][1][1:], rows[pos][0])
        pos += 1
    if pos < len(rows) and rows[pos][1][0] == "solution":
        line_no, tokens = rows[pos]
        values = _ints(tokens[1:], line_no, "solution")
        if len(values) != n or any(not 0 <= x < d for x in values):
            raise InstanceFormatError(line_no, f"solution must list {n} values in [0, {d})")
        forced_solution = Assignment(values)
        pos += 1

    constraints = []
    while pos < len(rows):
        line_no, tokens = rows[pos]
        if tokens[0] != "c":
            raise InstanceFormatError(line_no, f"expected a constraint line, got {tokens[0]!r}")
        fields = _ints(tokens[1:], line_no, "constraint line")
        if len(fields) != k + 1:
            raise InstanceFormatError(line_no, f"constraint line needs {k} variables and a count")
        scope, t = fields[:k], fields[k]
        if any(not 0 <= v < n for v in scope):
            raise InstanceFormatError(line_no, f"scope {scope} out of range [0, {n})")
        if any(b <= a for a, b in zip(scope, scope[1:])):
            raise InstanceFormatError(line_no, f"scope {scope} is not strictly increasing")
        pos += 1
        tuples = []
        for _ in range(t):
            if pos >= len(rows) or rows[pos][1][0] == "c":
                at = rows[pos][0] if pos < len(rows) else end_line
                raise InstanceFormatError(at, f"constraint declares {t} tuples but has {len(tuples)}")
            tuple_line, tuple_tokens = rows[pos]
            values = _ints(tuple_tokens, tuple_line, "forbidden tuple")
            if len(values) != k or any(not 0 <= x < d for x in values):
                raise InstanceFormatError(tuple_line, f"tuple must hold {k} values in [0, {d})")
            tuples.append(tuple(values))
            pos += 1
        if len(set(tuples)) != len(tuples):
            raise InstanceFormatError(line_no, "constraint repeats a forbidden tuple")
        constraints.append(Constraint(scope, tuples))

    if len(constraints) != m:
        raise InstanceFormatError(end_line, f"header declares m={m} constraints, found {len(constraints)}")
    try:
        instance = Instance(n=n, d=d, constraints=constraints)
    except InvalidArgumentError as e:
        raise InstanceFormatError(end_line, str(e)) from None
    return GeneratedInstance(params=params, dims=DerivedDims(d=d, m=m), instance=instance,
                             forced_solution=forced_solution)


def read_instance(path):
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def write_assignment(a, path):
    """One ``solution x1 ... xn`` line, the same syntax instance files use."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("solution " + " ".join(map(str, a.values)) + "\n", encoding="utf-8")
    return str(path)


def read_assignment(path):
    text = Path(path).read_text(encoding="utf-8")
    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        if tokens[0] != "solution":
            raise InstanceFormatError(line_no, "expected 'solution <x1> ... <xn>'")
        return Assignment(_ints(tokens[1:], line_no, "solution"))
    raise InstanceFormatError(1, "no solution line")


def metadata_comments(gi):
    """DIMACS comment lines naming the generator params and the forced solution."""
    comments = [f"{INSTANCE_FORMAT_TAG} n {gi.instance.n} d {gi.instance.d} m {gi.instance.m}"]
    if gi.params is not None:
        comments.append(format_params(gi.params))
    if gi.forced_solution is not None:
        comments.append("solution " + " ".join(map(str, gi.forced_solution.values)))
    return comments


def dimacs_lines(formula):
    lines = [f"c {comment}" for comment in formula.comments]
    lines.append(f"p cnf {formula.var_count} {formula.clause_count}")
    lines.extend(" ".join(map(str, clause)) + " 0" for clause in formula.clauses)
    return lines


def write_dimacs(formula, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(dimacs_lines(formula)) + "\n", encoding="utf-8")
    return str(path)


def parse_dimacs(text):
    comments = []
    header = None
    literals = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InstanceFormatError(line_no, "expected 'p cnf <vars> <clauses>'")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise InstanceFormatError(line_no, "clause before the 'p cnf' header")
        try:
            literals.extend(int(tok) for tok in line.split())
        except ValueError:
            raise InstanceFormatError(line_no, "non-integer literal") from None
    if header is None:
        raise InstanceFormatError(1, "missing 'p cnf' header")

    clauses, current = [], []
    for lit in literals:
        if lit == 0:
            clauses.append(current)
            current = []
        else:
            current.append(lit)
    if current:
        raise InstanceFormatError(len(text.splitlines()), "last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise InstanceFormatError(
            len(text.splitlines()), f"header declares {header[1]} clauses, found {len(clauses)}"
        )
    return CnfFormula(var_count=header[0], clauses=clauses, comments=comments)


def read_dimacs(path):
    return parse_dimacs(Path(path).read_text(encoding="utf-8"))


def write_csv(frame, path):
    """Canonical CSV: header row, fixed column order, 6 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return str(path)


def csv_text(frame):
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
