"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data (trees, corpora, score files) failed validation."""


class MalformedTreeError(ValidationError):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class ContractError(ValueError):
    """An API precondition was violated by the caller."""


class TrainingDivergedError(RuntimeError):
    def __init__(self, step):
        self.step = step
        super().__init__(f"training diverged: non-finite loss at step {step}")
