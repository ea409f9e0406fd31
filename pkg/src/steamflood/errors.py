"""Exception hierarchy shared across the pipeline."""


class SteamfloodError(Exception):
    """Base class for all pipeline errors."""


# --- ingest ---

class MissingColumn(SteamfloodError):
    pass


class BadDate(SteamfloodError):
    pass


class KindConflict(SteamfloodError):
    pass


class EmptyInput(SteamfloodError):
    pass


class AllMissingSeries(SteamfloodError):
    pass


# --- features ---

class NoInfillWells(SteamfloodError):
    pass


class NoProductionWells(SteamfloodError):
    pass


class HistoryTooShort(SteamfloodError):
    pass


# --- gbt ---

class EmptyMatrix(SteamfloodError):
    pass


class NonFiniteInput(SteamfloodError):
    pass


class WidthMismatch(SteamfloodError):
    pass


class UntrainedModel(SteamfloodError):
    pass


# --- evaluation ---

class LengthMismatch(SteamfloodError):
    pass


class DegenerateVariance(SteamfloodError):
    pass


class TooFewDates(SteamfloodError):
    pass


class ZeroActualMonth(SteamfloodError):
    """A month with zero actual production; reported as a row flag, raised only on direct misuse."""


# --- optimizer ---

class StepNotDivisor(SteamfloodError):
    pass


class ContextTooShort(SteamfloodError):
    pass


class SameWellTwice(SteamfloodError):
    pass


# --- config / service ---

class ConfigError(SteamfloodError):
    pass
