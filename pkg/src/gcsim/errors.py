"""Exception types raised across the simulator."""


class GcsimError(Exception):
    pass


class UnsupportedPair(GcsimError):
    """No built-in parameters exist for a (level, technology) pair."""

    def __init__(self, level, tech, detail=""):
        self.level = level
        self.tech = tech
        msg = f"no built-in parameters for {tech} at {level}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvalidGeometry(GcsimError):
    pass


class OutOfRange(GcsimError):
    pass


class ConfigError(GcsimError):
    """Configuration failed validation; ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class MissingPayload(GcsimError):
    pass


class TraceError(GcsimError):
    pass


class BadHeader(TraceError):
    pass


class MalformedLine(TraceError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class InvariantViolation(AssertionError):
    """A simulator self-check failed (stale read, broken conservation)."""


class ReportError(GcsimError):
    """A report file is malformed or from an incompatible schema version."""
