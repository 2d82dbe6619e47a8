/// Small deterministic circuits (name, circuit text) with at most two input
/// bits and two T gates, used by the self-test and the acceptance suite.
pub const DETERMINISTIC_PROGRAMS: &[(&str, &str)] = &[
    ("identity", "qubits 2 inputs 2 outputs 0,1\n"),
    ("swap", "qubits 2 inputs 2 outputs 0,1\nCNOT 0 1\nCNOT 1 0\nCNOT 0 1\n"),
    ("hh", "qubits 1 inputs 1 outputs 0\nH 0\nH 0\n"),
    ("hh-cnot-hh", "qubits 2 inputs 2 outputs 0,1\nH 0\nH 1\nCNOT 0 1\nH 0\nH 1\n"),
    ("tt", "qubits 1 inputs 1 outputs 0\nT 0\nT 0\n"),
    ("t-cnot", "qubits 2 inputs 1 outputs 0,1\nT 0\nCNOT 0 1\n"),
    ("cnot-tt-cnot", "qubits 2 inputs 2 outputs 0,1\nCNOT 0 1\nT 1\nT 1\nCNOT 0 1\n"),
    ("h-cnot-cnot-h", "qubits 2 inputs 2 outputs 0,1\nH 0\nCNOT 0 1\nCNOT 0 1\nH 0\n"),
    ("parity-t", "qubits 3 inputs 2 outputs 2\nCNOT 0 2\nCNOT 1 2\nT 2\nH 2\nH 2\n"),
    ("hh-t-hh", "qubits 1 inputs 1 outputs 0\nH 0\nH 0\nT 0\nH 0\nH 0\n"),
];
