"""Exception types shared across the package."""


class StructPriorsError(Exception):
    """Base class for every package-specific error."""


class ShapeMismatch(StructPriorsError):
    """Array shapes are incompatible with the network description."""


class NonFiniteValue(StructPriorsError):
    """A public operation produced NaN or Inf."""


class LabelOutOfRange(StructPriorsError):
    """A class label falls outside [0, n_classes)."""


class DegenerateLayer(StructPriorsError):
    """Layer weights have zero variance and cannot be standardized."""


class MissingExemplars(StructPriorsError):
    """A feature-specific prior was requested without class exemplars."""


class InsufficientClassExamples(StructPriorsError):
    """A class has fewer examples than the requested sample size."""


class BadMagic(StructPriorsError):
    """A binary file header does not carry the expected magic number."""


class TruncatedFile(StructPriorsError):
    """A binary file is shorter than its header or record size implies."""


class CountMismatch(StructPriorsError):
    """Image and label files disagree on the number of records."""


class EmptyHistogram(StructPriorsError):
    """Entropy of a histogram with zero total count is undefined."""


class ConstantSequence(StructPriorsError):
    """Pearson correlation is undefined for a constant sequence."""


class NonFiniteLoss(StructPriorsError):
    """Training loss became NaN or Inf; the run is aborted."""


class ConfigError(StructPriorsError):
    """A run configuration is invalid; the message names the field."""
