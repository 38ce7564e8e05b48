from __future__ import annotations

import numpy as np
import pytest

from qtabu.qasm import Program, QasmParseError, parse, serialize
from qtabu.statevector import Gate, GateOp, MeasureOp


def test_parse_single_gate():
    program = parse("qreg q[1]; creg c[1]; h q[0];")
    assert program == Program(1, 1, [GateOp(Gate.H, 0)])


def test_parse_all_statement_forms():
    source = """
    // full statement zoo
    qreg q[3];
    creg c[2];
    x q[0]; z q[1]; h q[2];
    cx q[0],q[2];
    measure q[1] -> c[0];
    if(c[0]==1) x q[2];
    if(c[1]==1) z q[0];
    """
    program = parse(source)
    assert program.n_qubits == 3
    assert program.n_cbits == 2
    assert program.instructions == [
        GateOp(Gate.X, 0),
        GateOp(Gate.Z, 1),
        GateOp(Gate.H, 2),
        GateOp(Gate.CX, 2, control=0),
        MeasureOp(1, 0),
        GateOp(Gate.X, 2, condition=(0, 1)),
        GateOp(Gate.Z, 0, condition=(1, 1)),
    ]


def test_parse_is_whitespace_insensitive():
    compact = parse("qreg q[2];creg c[1];cx q[0],q[1];measure q[0]->c[0];")
    spread = parse("qreg q[2] ;\n creg c[1] ;\n cx q[ 0 ] , q[ 1 ] ;\nmeasure q[0] -> c[0];")
    assert compact == spread


def test_comments_ignored():
    program = parse("// leading\nqreg q[1]; // trailing\ncreg c[0];\nx q[0]; // gate\n")
    assert program.instructions == [GateOp(Gate.X, 0)]


def _error(source: str) -> QasmParseError:
    with pytest.raises(QasmParseError) as info:
        parse(source)
    return info.value


def test_error_rendering_format():
    err = _error("qreg q[1]; creg c[1]; y q[0];")
    assert str(err) == "1:23: unknown-gate: unknown gate 'y'"
    assert (err.line, err.column, err.kind) == (1, 23, "unknown-gate")


def test_unknown_gate_on_own_line():
    err = _error("qreg q[2];\ncreg c[0];\nfoo q[0];")
    assert (err.line, err.column, err.kind) == (3, 1, "unknown-gate")


def test_redeclaration_error():
    err = _error("qreg q[2];\nqreg q[2];")
    assert (err.kind, err.line, err.column) == ("redeclaration", 2, 1)
    err = _error("qreg q[2]; creg c[1]; creg c[1];")
    assert err.kind == "redeclaration"


def test_range_errors():
    err = _error("qreg q[2];\ncreg c[1];\nx q[5];")
    assert err.kind == "range"
    assert (err.line, err.column) == (3, 5)
    assert "qubit index 5" in err.message
    err = _error("qreg q[2]; creg c[1]; measure q[0] -> c[3];")
    assert err.kind == "range"
    err = _error("x q[0]; qreg q[1]; creg c[0];")
    assert err.kind == "range"  # register used before declaration
    err = _error("qreg q[2]; creg c[0]; cx q[1],q[1];")
    assert err.kind == "range"  # control and target must differ


def test_syntax_errors():
    assert _error("qreg q[1]; creg c[0]; cx q[0];").kind == "syntax"
    assert _error("qreg q[1]; creg c[0]; x q[0]").kind == "syntax"  # missing semicolon
    assert _error("qreg q[1]; creg c[1]; if(c[0]==2) x q[0];").kind == "syntax"
    assert _error("qreg q[1]; creg c[1]; if(c[0]==1) h q[0];").kind == "syntax"
    assert _error("qreg q[1]; creg c[1]; if(c[0]==1) cx q[0],q[1];").kind == "syntax"
    assert _error("qreg r[1]; creg c[0];").kind == "syntax"  # register must be named q
    assert _error("qreg q[1]; creg c[0]; x q[0]; $").kind == "syntax"
    assert _error("qreg q[1];").kind == "syntax"  # missing creg
    assert _error("").kind == "syntax"


def test_conditioned_unknown_gate():
    assert _error("qreg q[1]; creg c[1]; if(c[0]==1) y q[0];").kind == "unknown-gate"


def test_error_positions_inside_source():
    for source in ("qreg q[1]; creg c[0]; x q[9];", "qreg q[1]", "qreg q[1]; creg c[0]; x"):
        err = _error(source)
        lines = source.splitlines() or [""]
        assert 1 <= err.line <= len(lines)
        assert err.column >= 1


def test_serialize_canonical_form():
    text = serialize(Program(1, 0, [GateOp(Gate.X, 0)]))
    assert text == "qreg q[1];\ncreg c[0];\nx q[0];\n"


def test_serialize_empty_program_headers_only():
    assert serialize(Program(2, 1, [])) == "qreg q[2];\ncreg c[1];\n"


def test_serialize_rejects_inexpressible():
    with pytest.raises(ValueError, match="conditioned"):
        serialize(Program(2, 1, [GateOp(Gate.CX, 1, control=0, condition=(0, 1))]))
    with pytest.raises(ValueError, match="must be 1"):
        serialize(Program(1, 1, [GateOp(Gate.X, 0, condition=(0, 0))]))
    with pytest.raises(ValueError, match="out of range"):
        serialize(Program(1, 0, [GateOp(Gate.X, 3)]))


def _random_program(rng: np.random.Generator) -> Program:
    n_qubits = int(rng.integers(1, 6))
    n_cbits = int(rng.integers(1, 4))
    instructions: list[GateOp | MeasureOp] = []
    for _ in range(int(rng.integers(0, 12))):
        choice = rng.integers(5)
        qubit = int(rng.integers(n_qubits))
        cbit = int(rng.integers(n_cbits))
        if choice == 0 and n_qubits >= 2:
            control, target = (int(v) for v in rng.choice(n_qubits, size=2, replace=False))
            instructions.append(GateOp(Gate.CX, target, control=control))
        elif choice == 1:
            instructions.append(MeasureOp(qubit, cbit))
        elif choice == 2:
            kind = Gate.X if rng.random() < 0.5 else Gate.Z
            instructions.append(GateOp(kind, qubit, condition=(cbit, 1)))
        else:
            kind = (Gate.X, Gate.Z, Gate.H)[int(rng.integers(3))]
            instructions.append(GateOp(kind, qubit))
    return Program(n_qubits, n_cbits, instructions)


def test_round_trip_identity_on_random_programs():
    rng = np.random.default_rng(31)
    for _ in range(50):
        program = _random_program(rng)
        assert parse(serialize(program)) == program


def test_serialize_of_parse_is_stable():
    source = "qreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\nmeasure q[0] -> c[0];\nif(c[0]==1) z q[1];\n"
    assert serialize(parse(source)) == source
