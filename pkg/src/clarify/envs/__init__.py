"""Simulated tool environments, one per application domain."""

from .base import (
    AGENT_KINDS,
    CONTRADICTION,
    ERROR_KINDS,
    INCOMPLETE,
    DomainUpdateRule,
    Environment,
    ExecutionError,
    ExecutionResult,
)
from .document import DocumentEnv
from .filesystem import FileSystemEnv
from .trading import TradingEnv
from .travel import TravelEnv
from .vehicle import VehicleEnv

ENVIRONMENTS = {cls.name: cls for cls in (FileSystemEnv, DocumentEnv, VehicleEnv, TravelEnv, TradingEnv)}
DOMAINS = tuple(ENVIRONMENTS)


def env_class(domain: str) -> type:
    try:
        return ENVIRONMENTS[domain]
    except KeyError:
        raise KeyError(f"unknown domain {domain!r}; expected one of {list(DOMAINS)}") from None


def make_env(domain: str, state=None) -> Environment:
    return env_class(domain)(state)


__all__ = [
    "AGENT_KINDS",
    "CONTRADICTION",
    "DOMAINS",
    "ENVIRONMENTS",
    "ERROR_KINDS",
    "INCOMPLETE",
    "DocumentEnv",
    "DomainUpdateRule",
    "Environment",
    "ExecutionError",
    "ExecutionResult",
    "FileSystemEnv",
    "TradingEnv",
    "TravelEnv",
    "VehicleEnv",
    "env_class",
    "make_env",
]
