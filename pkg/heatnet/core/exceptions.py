"""
Exception hierarchy shared by all heatnet modules.

Every error carries an optional ``key`` naming the offending node id, arc id,
constraint or document path, so that callers (the CLI in particular) can
report it in machine-readable form.
"""

from typing import Any, Dict, Optional


class HeatNetError(Exception):
    """Base class for all library errors"""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.key = key

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "key": self.key,
        }


class NetworkValidationError(HeatNetError, ValueError):
    """Network document or topology violates a structural rule"""


class UnknownNodeError(HeatNetError, KeyError):
    """Lookup of a node id that is not part of the network"""

    def __str__(self) -> str:
        return self.message


class ScenarioError(HeatNetError, ValueError):
    """Scenario document is malformed or inconsistent with the network"""


class DiscretizationError(HeatNetError, ValueError):
    """Grid parameters are inconsistent with the horizon or the pipes"""


class EvaluationDomainError(HeatNetError, ArithmeticError):
    """Division by ~0 or square root of a negative number during evaluation"""

    def __init__(self, message: str, constraint_index: int, constraint_name: str):
        super().__init__(message, key=constraint_name)
        self.constraint_index = constraint_index
        self.constraint_name = constraint_name


class SolveError(HeatNetError, RuntimeError):
    """A pipeline phase could not produce a usable point"""
