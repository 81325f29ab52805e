"""
One proposition x(v, a) per variable/value pair, numbered v * d + a + 1.

Clauses, in this order:
    1. at-least-one per variable:   x(v,0) | ... | x(v,d-1)
    2. at-most-one per variable (when amo): ~x(v,a) | ~x(v,b) for a < b
    3. one conflict clause per forbidden tuple (a1..ak) on scope (v1..vk):
       ~x(v1,a1) | ... | ~x(vk,ak)
Variables ascend; constraints and tuples keep their stored order.

With amo the map from CSP solutions to CNF models is a bijection; without
it every CSP solution still maps to a model.
"""

import logging
import shutil
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))
from src.core import Assignment, DecodeError, InvalidArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CnfFormula:
    var_count: int
    clauses: tuple
    comments: tuple = field(default=(), compare=False)

    def __post_init__(self):
        clauses = tuple(tuple(int(lit) for lit in clause) for clause in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "comments", tuple(self.comments))
        for clause in clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.var_count:
                    raise InvalidArgumentError(
                        f"literal {lit} out of range for {self.var_count} variables"
                    )

    @property
    def clause_count(self):
        return len(self.clauses)


def proposition(v, a, d):
    return v * d + a + 1


def encode_direct(inst, amo=True, comments=()):
    d = inst.d
    clauses = []
    for v in range(inst.n):
        clauses.append([proposition(v, a, d) for a in range(d)])
    if amo:
        for v in range(inst.n):
            for a in range(d):
                for b in range(a + 1, d):
                    clauses.append([-proposition(v, a, d), -proposition(v, b, d)])
    for c in inst.constraints:
        for t in c.forbidden:
            clauses.append([-proposition(v, a, d) for v, a in zip(c.scope, t)])
    logger.debug("encoded n=%d d=%d into %d vars, %d clauses", inst.n, d, inst.n * d, len(clauses))
    return CnfFormula(var_count=inst.n * d, clauses=clauses, comments=comments)


def encode_assignment(inst, a):
    """The model of ``a`` under the direct encoding (with at-most-one)."""
    d = inst.d
    true_props = {proposition(v, x, d) for v, x in enumerate(a.values)}
    return [p if p in true_props else -p for p in range(1, inst.n * d + 1)]


def decode_model(inst, model, amo=True):
    """
    Read back the assignment encoded by ``model``.

    ``model`` lists literals; a positive literal means the proposition is
    true. Without amo the smallest true value of each variable is taken.

    Raises:
        DecodeError: a variable has no true value, or several with amo
    """
    d = inst.d
    truth = set(lit for lit in model if lit > 0)
    values = []
    for v in range(inst.n):
        true_values = [a for a in range(d) if proposition(v, a, d) in truth]
        if not true_values:
            raise DecodeError(v, "no value is true in the model")
        if amo and len(true_values) > 1:
            raise DecodeError(v, f"several values are true: {true_values}")
        values.append(true_values[0])
    return Assignment(values)


def parse_solver_output(text):
    """
    Parse competition-style solver output.

    Returns:
        (verdict, literals): verdict is 'SAT', 'UNSAT' or 'UNKNOWN'
    """
    verdict = "UNKNOWN"
    literals = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                verdict = "SAT"
            elif word == "UNSATISFIABLE":
                verdict = "UNSAT"
        elif line.startswith("v "):
            literals.extend(int(tok) for tok in line[2:].split() if tok != "0")
    return verdict, literals


def run_external_solver(formula, command, timeout=None):
    """
    Run a DIMACS SAT solver on ``formula``.

    ``command`` is an argument list; the CNF file path is appended. The
    solver must print ``s SATISFIABLE`` and ``v`` lines. No solver is
    bundled.

    Returns:
        (verdict, literals)
    """
    from src.instance_io import write_dimacs

    if shutil.which(command[0]) is None:
        raise InvalidArgumentError(f"solver executable not found: {command[0]}")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "formula.cnf"
        write_dimacs(formula, path)
        try:
            result = subprocess.run(list(command) + [str(path)], capture_output=True,
                                    text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            logger.warning("external solver timed out after %ss", timeout)
            return "UNKNOWN", []
    return parse_solver_output(result.stdout)
