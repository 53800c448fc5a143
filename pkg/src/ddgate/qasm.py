"""OpenQASM 2 export and a small parser for the subset we emit.

Engineered gates are written as Pauli sandwiches around ``cx`` and ECR gets a
``gate`` definition, so the output only uses ``x, y, z, h, rz, cx, cz``.
QASM semantics fix gates up to a global phase; round-trip comparisons
therefore use a phase-insensitive distance.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field

import numpy as np

from .circuits import FRAME_OF, Circuit, apply_gate
from .errors import DDGateError, UnsupportedGate
from .ops import I2, SX, SY, SZ

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
ECR_DEFINITION = "gate ecr a,b { h a; cx a,b; rz(pi/2) b; cx a,b; h a; x b; }"

_SIMPLE = {"X": "x", "Y": "y", "Z": "z", "CNOT": "cx", "CZ": "cz", "ECR": "ecr"}


def _args(targets) -> str:
    return ",".join(f"q[{t}]" for t in targets)


def export_circuit(c: Circuit, measure: bool = False, barriers: bool = True) -> str:
    """OpenQASM 2 text for ``c``.

    ``barriers`` fences each run of decoupling pulses so a compiler cannot
    cancel them against each other.
    """
    body: list[str] = []
    if any(g.label == "ECR" for g in c.gates):
        body.append(ECR_DEFINITION)
    body.append(f"qreg q[{c.qubit_count}];")
    if measure:
        body.append(f"creg c[{c.qubit_count}];")
    in_dd = False
    for g in c.gates:
        is_dd = g.role == "dd"
        if barriers and is_dd != in_dd:
            body.append("barrier q;")
        in_dd = is_dd
        if g.label in _SIMPLE:
            body.append(f"{_SIMPLE[g.label]} {_args(g.targets)};")
        elif g.label in FRAME_OF:
            s = FRAME_OF[g.label].lower()
            sandwich = [] if s == "i" else [f"{s} q[{t}];" for t in g.targets]
            body.extend(sandwich + [f"cx {_args(g.targets)};"] + sandwich)
        else:
            raise UnsupportedGate(f"gate {g.label!r} has no OpenQASM 2 form")
    if barriers and in_dd:
        body.append("barrier q;")
    if measure:
        body.append("measure q -> c;")
    return HEADER + "\n".join(body) + "\n"


# parsing -----------------------------------------------------------------

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
S = np.diag([1, 1j])


def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


_FIXED = {
    "id": I2, "x": SX, "y": SY, "z": SZ, "h": H, "s": S, "sdg": S.conj().T,
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
}
_PARAM = {"rz": _rz}

_STATEMENT = re.compile(r"^(\w+)\s*(?:\(([^)]*)\))?\s*(.*)$")


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub,
           ast.Mult: operator.mul, ast.Div: operator.truediv}


def _angle(expr: str) -> float:
    """Evaluate an angle such as ``-pi/2`` or ``3*pi/4``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise DDGateError(f"unsupported angle expression {expr!r}")

    try:
        return ev(ast.parse(expr.strip(), mode="eval"))
    except SyntaxError as exc:
        raise DDGateError(f"unsupported angle expression {expr!r}") from exc


@dataclass
class ParsedCircuit:
    qubit_count: int
    operations: list[tuple[np.ndarray, tuple[int, ...]]] = field(default_factory=list)

    def unitary(self) -> np.ndarray:
        d = 2 ** self.qubit_count
        cols = np.eye(d, dtype=complex)
        for m, targets in self.operations:
            cols = apply_gate(cols, m, targets, self.qubit_count)
        return cols.T


def _split_statements(text: str) -> list[str]:
    text = re.sub(r"//[^\n]*", "", text)
    out, depth, cur = [], 0, []
    for ch in text:
        cur.append(ch)
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                out.append("".join(cur).strip())
                cur = []
        elif ch == ";" and depth == 0:
            out.append("".join(cur).strip()[:-1].strip())
            cur = []
    if "".join(cur).strip():
        raise DDGateError("trailing text without ';'")
    return [s for s in out if s]


def parse_qasm(text: str) -> ParsedCircuit:
    """Parse the emitted subset: one ``qreg``, qelib1 basics and simple ``gate`` macros."""
    macros: dict[str, tuple[list[str], list[str]]] = {}
    circuit: ParsedCircuit | None = None
    reg = "q"

    def expand(name, params, qubits, sink):
        if name in _FIXED:
            sink.append((_FIXED[name], tuple(qubits)))
        elif name in _PARAM:
            sink.append((_PARAM[name](_angle(params)), tuple(qubits)))
        elif name in macros:
            formals, body = macros[name]
            bind = dict(zip(formals, qubits))
            for stmt in body:
                m = _STATEMENT.match(stmt)
                sub, sub_params, sub_args = m.group(1), m.group(2), m.group(3)
                expand(sub, sub_params, [bind[a.strip()] for a in sub_args.split(",")], sink)
        else:
            raise UnsupportedGate(f"unknown gate {name!r}")

    for stmt in _split_statements(text):
        if stmt.startswith("OPENQASM") or stmt.startswith("include"):
            continue
        if stmt.startswith("gate "):
            m = re.match(r"gate\s+(\w+)\s+([\w,\s]+?)\s*\{(.*)\}$", stmt, re.S)
            if not m:
                raise DDGateError(f"cannot parse gate definition {stmt!r}")
            body = [s.strip() for s in m.group(3).split(";") if s.strip()]
            macros[m.group(1)] = ([a.strip() for a in m.group(2).split(",")], body)
            continue
        if stmt.startswith("qreg"):
            m = re.match(r"qreg\s+(\w+)\[(\d+)\]$", stmt)
            reg = m.group(1)
            circuit = ParsedCircuit(int(m.group(2)))
            continue
        if stmt.startswith(("creg", "barrier", "measure")):
            continue
        if circuit is None:
            raise DDGateError("gate statement before qreg")
        m = _STATEMENT.match(stmt)
        qubits = [int(q) for q in re.findall(rf"{reg}\[(\d+)\]", m.group(3))]
        expand(m.group(1), m.group(2), qubits, circuit.operations)
    if circuit is None:
        raise DDGateError("no qreg declaration")
    return circuit
