"""Exception types shared across the engine, simulator, service, and CLI."""


class StreamMemError(Exception):
    """Base class for all library errors."""


class ConfigurationError(StreamMemError):
    """Invalid configuration, dimensions, or arguments.

    Carries an optional ``field`` naming the offending config key so the
    service and CLI can surface it in structured error payloads.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DegenerateTangentError(StreamMemError):
    """Exact motion-neutral projection was asked for a zero tangent.

    Callers must fall back to the stabilized projection in this case.
    """


class EngineStateError(StreamMemError):
    """Engine driven past its schedule or used after being closed."""
