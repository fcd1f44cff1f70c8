"""Exception types raised across the package."""


class MRSyntaxError(SyntaxError):
    """Malformed meaning-representation string.

    ``offset`` is the byte offset (UTF-8) of the offending position.
    """

    def __init__(self, message, text="", offset=0):
        super().__init__(f"{message} at byte {offset}")
        self.msg = message
        self.text = text
        self.offset = offset


class EmptyBackground(ValueError):
    pass


class EmptyCorpus(ValueError):
    pass


class EmptyTest(ValueError):
    pass


class EmptyTraining(ValueError):
    pass


class EmptyClassInput(ValueError):
    pass


class InsufficientPool(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class NoSlots(ValueError):
    pass


class UntrainedModel(RuntimeError):
    pass


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    """Wraps any failure inside a pipeline stage, carrying the stage name."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
