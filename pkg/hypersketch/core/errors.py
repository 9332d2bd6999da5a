"""
Exception hierarchy for hypersketch.
Every error carries the CLI exit code it maps to: 2 for bad input,
3 for resource or budget limits. Verification failures are results, not errors.
"""

from typing import Optional

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_RESOURCE_ERROR = 3


class HypersketchError(Exception):
    """Base class for all hypersketch errors."""

    exit_code = EXIT_INPUT_ERROR


# ─── Input Errors ───

class InputError(HypersketchError):
    exit_code = EXIT_INPUT_ERROR


class HypergraphFormatError(InputError):
    """Malformed hypergraph, stream or sparsifier text."""

    def __init__(self, message: str, line: int, column: int = 1, source: str = "<input>"):
        self.line = line
        self.column = column
        self.source = source
        super().__init__(f"{source}:{line}:{column}: {message}")


class VertexOutOfRangeError(InputError):
    def __init__(self, vertex: int, n: int):
        self.vertex = vertex
        self.n = n
        super().__init__(f"vertex {vertex} out of range for n={n}")


class ArityError(InputError):
    pass


class PartitionError(InputError):
    pass


class NegativeMultiplicityError(InputError):
    def __init__(self, edge, multiplicity: int):
        self.edge = edge
        self.multiplicity = multiplicity
        super().__init__(f"edge {edge} would reach multiplicity {multiplicity}")


class ConfigMismatchError(InputError):
    pass


class BankFormatError(InputError):
    pass


class ParameterError(InputError):
    pass


# ─── Resource Errors ───

class ResourceError(HypersketchError):
    exit_code = EXIT_RESOURCE_ERROR


class OracleCapExceededError(ResourceError):
    def __init__(self, size: int, cap: int, what: str = "vertices"):
        self.size = size
        self.cap = cap
        super().__init__(f"exact oracle limited to {cap} {what}, got {size}")


class SparsityCapExceededError(ResourceError):
    pass


class EdgeBudgetExceededError(ResourceError):
    def __init__(self, total: int, m_max: int):
        self.total = total
        self.m_max = m_max
        super().__init__(f"{total} edges counted with multiplicity exceed m_max={m_max}")


class BudgetExceededError(ResourceError):
    def __init__(self, round_index: int, machine: int, used: int, budget: int,
                 detail: Optional[str] = None):
        self.round_index = round_index
        self.machine = machine
        self.used = used
        self.budget = budget
        msg = f"round {round_index}: machine {machine} used {used} bytes (budget {budget})"
        if detail:
            msg += f" [{detail}]"
        super().__init__(msg)
