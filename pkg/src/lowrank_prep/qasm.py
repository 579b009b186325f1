"""OpenQASM 2.0 export and import for the ``u`` / ``cx`` subset."""
from __future__ import annotations

import re

from .circuit import CX, Circuit, U
from .errors import ParseError

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";'
_BIT_ORDER_NOTE = "// bit order: big-endian, q[0] is the most significant bit of the state index"

_FLOAT = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_RE_QREG = re.compile(r"qreg\s+(\w+)\s*\[\s*(\d+)\s*\]\s*;")
_RE_U = re.compile(
    rf"u\s*\(\s*({_FLOAT})\s*,\s*({_FLOAT})\s*,\s*({_FLOAT})\s*\)\s*(\w+)\s*\[\s*(\d+)\s*\]\s*;"
)
_RE_CX = re.compile(r"cx\s+(\w+)\s*\[\s*(\d+)\s*\]\s*,\s*(\w+)\s*\[\s*(\d+)\s*\]\s*;")
_RE_PHASE = re.compile(rf"//\s*global_phase:\s*({_FLOAT})\s*$")


def emit_qasm(c: Circuit) -> str:
    lines = [
        HEADER,
        f"// global_phase: {c.global_phase!r}",
        _BIT_ORDER_NOTE,
        f"qreg q[{c.width}];",
    ]
    for g in c.gates:
        if isinstance(g, U):
            lines.append(f"u({g.theta!r},{g.phi!r},{g.lam!r}) q[{g.qubit}];")
        else:
            lines.append(f"cx q[{g.control}],q[{g.target}];")
    return "\n".join(lines) + "\n"


def parse_qasm(text: str) -> Circuit:
    """Parse text in the subset written by :func:`emit_qasm`."""
    circuit = None
    reg = None
    phase = 0.0
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("//"):
            m = _RE_PHASE.match(line)
            if m:
                phase = float(m.group(1))
            continue
        if line == "OPENQASM 2.0;":
            saw_header = True
            continue
        if not saw_header:
            raise ParseError(lineno, "expected 'OPENQASM 2.0;' header")
        if line.startswith("include"):
            if line != 'include "qelib1.inc";':
                raise ParseError(lineno, f"unsupported include: {line}")
            continue
        m = _RE_QREG.fullmatch(line)
        if m:
            if circuit is not None:
                raise ParseError(lineno, "only one quantum register is supported")
            reg = m.group(1)
            circuit = Circuit(int(m.group(2)))
            continue
        if circuit is None:
            raise ParseError(lineno, "gate before register declaration")
        m = _RE_U.fullmatch(line)
        if m:
            theta, phi, lam = (float(m.group(i)) for i in (1, 2, 3))
            q = _qubit(m.group(4), m.group(5), reg, circuit.width, lineno)
            circuit.append(U(theta, phi, lam, q))
            continue
        m = _RE_CX.fullmatch(line)
        if m:
            c = _qubit(m.group(1), m.group(2), reg, circuit.width, lineno)
            t = _qubit(m.group(3), m.group(4), reg, circuit.width, lineno)
            if c == t:
                raise ParseError(lineno, "cx control equals target")
            circuit.append(CX(c, t))
            continue
        word = line.split("(")[0].split()[0]
        raise ParseError(lineno, f"unsupported statement '{word}'")
    if circuit is None:
        raise ParseError(max(1, len(text.splitlines())), "no quantum register declared")
    circuit.global_phase = phase
    return circuit


def _qubit(name: str, index: str, reg: str, width: int, lineno: int) -> int:
    if name != reg:
        raise ParseError(lineno, f"unknown register '{name}'")
    q = int(index)
    if q >= width:
        raise ParseError(lineno, f"qubit index {q} out of range for {reg}[{width}]")
    return q
