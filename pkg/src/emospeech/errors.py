"""Exception types raised by the pipeline, grouped by processing stage."""


class PipelineError(Exception):
    """Base class for every error raised by this package."""


# --- audio file handling ---

class MalformedHeader(PipelineError):
    """File is not a well-formed RIFF/WAVE container."""


class UnsupportedEncoding(PipelineError):
    """WAV encoding other than integer PCM (8/16/24-bit) or 32-bit float."""


class EmptyAudio(PipelineError):
    """Audio buffer or file contains zero samples."""


class IoFailure(PipelineError):
    """Underlying file read or write failed."""


# --- short-time signal processing ---

class SignalTooShort(PipelineError):
    """Signal shorter than a single analysis frame."""


class InvalidLength(PipelineError):
    """Window length below the minimum of 2 samples."""


class LengthMismatch(PipelineError):
    """Two sequences that must have equal length do not."""


class NotPowerOfTwo(PipelineError):
    """Transform size is not a power of two."""


# --- mel filterbank / cepstral analysis ---

class NegativeFrequency(PipelineError):
    """Frequency argument below 0 Hz."""


class InvalidBand(PipelineError):
    """Filterbank band edges out of order or beyond the Nyquist frequency."""


class TooFewBins(PipelineError):
    """FFT resolution too coarse: adjacent filter edges collapse onto one bin."""


class DimensionMismatch(PipelineError):
    """Matrix/vector dimensions incompatible with the fitted or declared shape."""


class InvalidCoeffCount(PipelineError):
    """Requested cepstral coefficient count outside [2, n_filters]."""


class EmptyInput(PipelineError):
    """Operation received an empty sequence."""


class EvenSmoothWidth(PipelineError):
    """Moving-average width must be odd."""


# --- peak analysis ---

class ContourTooShort(PipelineError):
    """Contour has fewer than 3 samples; no interior peak can exist."""


class InsufficientPeaks(PipelineError):
    """Fewer than 2 peaks found; inter-peak distance is undefined."""


# --- dataset handling ---

class SchemaMismatch(PipelineError):
    """File header or column structure differs from the declared schema."""


class UnknownLabel(PipelineError):
    """Class label outside the declared label set."""


class MalformedRow(PipelineError):
    """Data row cannot be parsed against the schema."""


class ClassTooSmall(PipelineError):
    """A class has fewer than 2 records; it cannot be split."""


class DegenerateFractionWarning(UserWarning):
    """A class landed entirely in the training split, leaving its test side empty."""


# --- classifier training ---

class EmptyTrain(PipelineError):
    """Training set contains no records."""


class SingleClassTraining(PipelineError):
    """Training set contains fewer than 2 distinct classes."""


class NonFiniteFeature(PipelineError):
    """A feature value is NaN or infinite."""


# --- evaluation ---

class DegenerateClasses(PipelineError):
    """Binary AUC undefined: positives or negatives are absent."""


class InsufficientRepetitions(PipelineError):
    """Every repetition of an experiment cell was skipped."""


# --- corpus synthesis ---

class InvalidProfile(PipelineError):
    """Emotion profile violates its invariants."""
