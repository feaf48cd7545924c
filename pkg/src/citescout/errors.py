"""Exception types shared across the toolkit."""


class CorpusError(Exception):
    """Base class for paper-database failures."""


class BackendUnavailable(CorpusError):
    """Backend unreachable, or rate-limited past the retry budget."""


class EmptyQuery(CorpusError):
    pass


class UnknownPaper(CorpusError):
    pass


class FullTextUnavailable(CorpusError):
    pass


class ExcerptNotFound(CorpusError):
    pass


class GatewayError(Exception):
    """Base class for model-endpoint failures."""


class EndpointError(GatewayError):
    """Transient or terminal endpoint failure after retries."""


class ContextOverflow(GatewayError):
    """Request exceeded the model's context window; caller should truncate."""


class ScriptMismatch(GatewayError):
    """Scripted gateway was driven with a prompt its expectations reject."""


class ParseError(Exception):
    """Base class for failures extracting an action from a model response."""


class NoAction(ParseError):
    pass


class MultipleActions(ParseError):
    pass


class MalformedArguments(ParseError):
    pass


class MissingAsset(Exception):
    """A prompt template asset is missing from the installed package."""


class SchemaError(Exception):
    """A data file violates its documented schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateId(SchemaError):
    pass


class MissingRecord(Exception):
    """An evaluation input lacks a record for some benchmark item."""


class MissingHumanLabels(Exception):
    """Agreement was requested for an item without human labels."""


class EmptyInput(Exception):
    pass


class ServiceError(Exception):
    """Base class for session-service errors, carrying an HTTP-style code."""

    status = 500
    code = "internal"


class BadConfig(ServiceError):
    status = 400
    code = "bad_config"


class UnknownSession(ServiceError):
    status = 404
    code = "unknown_session"


class WrongState(ServiceError):
    status = 409
    code = "wrong_state"
