"""Exception types shared across the pipeline.

Every error carries a stable machine-readable ``code`` so callers (and the
CLI exit-code mapping) do not have to parse messages.
"""


class PipelineError(Exception):
    def __init__(self, code: str, message: str | None = None):
        super().__init__(message if message else code)
        self.code = code


class ConfigError(PipelineError):
    """Invalid configuration or parameters; maps to CLI exit code 2."""


class IngestError(PipelineError):
    """Fatal input-file problem (unreadable file, inconsistent labels)."""


class FitError(PipelineError):
    """A learner cannot be fitted on the given dataset."""


class EvalError(PipelineError):
    """Evaluation preconditions violated (fold sizes, degenerate scores)."""


class SchemaMismatchError(PipelineError):
    """A feature vector or model was used with the wrong feature schema."""


class CredulityError(PipelineError):
    """Ground-truth derivation or fold planning failed."""


class SynthError(PipelineError):
    """Synthetic corpus generation failed at runtime."""
