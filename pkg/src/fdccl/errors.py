"""Exception types shared across the package."""


class FDCCLError(Exception):
    """Base class for all package errors."""


class EdgeListParseError(FDCCLError, ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class EdgeListRangeError(FDCCLError, ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class GenerationError(FDCCLError, RuntimeError):
    """Raised when a topology cannot be generated for the requested spec."""


class DivergenceError(FDCCLError, FloatingPointError):
    def __init__(self, iteration: int, node: int):
        super().__init__(f"non-finite position at iteration {iteration}, node {node}")
        self.iteration = iteration
        self.node = node


class DegenerateLayoutError(FDCCLError, ValueError):
    """All nodes coincide, so there is no extent to scale to the canvas."""


class ImageFormatError(FDCCLError, ValueError):
    """Malformed, truncated or unsupported image file."""
