"""Exception hierarchy. Every error carries the name of the stage that raised it
so CLI failures can be attributed to a pipeline stage."""


class CutFunqueError(Exception):
    """Base class for all pipeline errors."""

    stage = "cutfunque"

    def __str__(self):
        return f"[{self.stage}] {super().__str__()}"


class ConfigError(CutFunqueError):
    stage = "config"


class DecodeError(CutFunqueError):
    stage = "video_io"


class CalibrationError(CutFunqueError):
    stage = "pucolor"

    def __init__(self, message, params=None, r2=None):
        super().__init__(message)
        self.params = params
        self.r2 = r2


class FitError(CutFunqueError):
    stage = "nss"


class AssemblyError(CutFunqueError):
    stage = "binning"


class PredictionError(CutFunqueError):
    stage = "model"
