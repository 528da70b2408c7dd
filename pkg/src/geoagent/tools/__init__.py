"""Tool registry, catalog, and MCP server."""

from .catalog import ToolContext, build_registry
from .registry import (
    ERROR_CLASSES,
    FILE_HALLUCINATION,
    INVALID_PARAMETERS,
    SYSTEM_ERROR,
    TOOL_HALLUCINATION,
    ParamSpec,
    ToolRegistry,
    ToolResult,
    ToolSpec,
    error_result,
    ok_result,
)

__all__ = [
    "ERROR_CLASSES",
    "FILE_HALLUCINATION",
    "INVALID_PARAMETERS",
    "SYSTEM_ERROR",
    "TOOL_HALLUCINATION",
    "ParamSpec",
    "ToolContext",
    "ToolRegistry",
    "ToolResult",
    "ToolSpec",
    "build_registry",
    "error_result",
    "ok_result",
]
