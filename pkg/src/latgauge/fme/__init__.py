# Location: src/latgauge/fme/__init__.py
from latgauge.fme.entropy import four_phase_entropy, reduced_spin_a, vn_entropy
from latgauge.fme.protocol import (
    BRANCHES,
    BranchState,
    ProtocolSpec,
    ProtocolTrace,
    dressed_move,
    embezzlement_null_test,
    entanglement_increase,
    entangling_energy,
    run_protocol,
    sweep_tau,
)

__all__ = [
    "BRANCHES",
    "BranchState",
    "ProtocolSpec",
    "ProtocolTrace",
    "dressed_move",
    "embezzlement_null_test",
    "entanglement_increase",
    "entangling_energy",
    "four_phase_entropy",
    "reduced_spin_a",
    "run_protocol",
    "sweep_tau",
    "vn_entropy",
]
