"""feederkit: distribution-feeder power flow, QSTS simulation, and an
MCP tool server with deterministic optimization skills."""

from .circuit import (
    Bus,
    Circuit,
    LineBranch,
    LoadSpec,
    RegulatorSpec,
    ShuntBank,
    SourceSpec,
    positive_sequence_magnitude,
)
from .editing import (
    AddCapacitor,
    AddReactor,
    EditLoad,
    RemoveCapacitor,
    RemoveReactor,
    SetTap,
    apply_equipment_change,
)
from .oracle import oracle_solve
from .solver import SolveResult, power_balance_residual, solve_power_flow

__version__ = "0.1.0"

__all__ = [
    "Bus",
    "Circuit",
    "LineBranch",
    "LoadSpec",
    "RegulatorSpec",
    "ShuntBank",
    "SourceSpec",
    "SolveResult",
    "AddCapacitor",
    "AddReactor",
    "EditLoad",
    "RemoveCapacitor",
    "RemoveReactor",
    "SetTap",
    "apply_equipment_change",
    "oracle_solve",
    "positive_sequence_magnitude",
    "power_balance_residual",
    "solve_power_flow",
    "__version__",
]
