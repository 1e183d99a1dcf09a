"""Exceptions raised by the ralab library.

Library code raises these; only the command line turns them into exit codes.
"""


class RalabError(Exception):
    """Base class of every error raised by ralab"""


class DomainError(RalabError, ValueError):
    """A value lies outside the domain of an operation"""


class ZeroAttempts(RalabError):
    """No frame was attempted inside the observation window.

    The reward query period is too short to observe traffic.
    """


class CounterRegression(RalabError):
    """A cumulative frame counter went backwards (backend reset)"""


class InvariantViolation(RalabError):
    """A data invariant does not hold, e.g. successes > attempts"""


class ParseFailure(RalabError):

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class BackendUnavailable(RalabError):
    """The environment backend cannot reach its data source"""


class TrainingDisabled(RalabError):
    """Training was requested on an agent whose training is disabled"""


class IoFailure(RalabError):
    """Reading or writing a file failed"""


class VersionMismatch(RalabError):
    """A checkpoint has an unknown format or version"""


class EmptyInput(RalabError):
    """An operation needs at least one sample"""


class ConfigError(RalabError):

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message


class RunFailed(RalabError):
    """At least one profiled scenario aborted before its last step"""
