"""Shared exception types raised across the engine."""


class EngineError(Exception):
    """Base class for every error the engine raises on purpose."""


# Curriculum loading and lookup.
class MalformedDocument(EngineError):
    pass


class UnknownPrerequisite(EngineError):
    pass


class PrerequisiteCycle(EngineError):
    pass


class MissingNoAssist(EngineError):
    pass


class UnknownBlockId(EngineError):
    pass


# Telemetry.
class InvalidPayload(EngineError):
    pass


class StorageFailure(EngineError):
    pass


class CorruptLog(EngineError):
    pass


# Tutor agents.
class EmptyCatalog(EngineError):
    pass


class OutOfRangeScore(EngineError):
    pass


class UnknownAction(EngineError):
    pass


class CorruptSnapshot(EngineError):
    pass


# Controller language runtime.
class MissingInput(EngineError):
    pass


# Activities.
class TooManyPairs(EngineError):
    pass


class NotAPermutation(EngineError):
    pass


class UnknownItemId(EngineError):
    pass


# Session service.
class UnknownCurriculum(EngineError):
    pass


class UnknownSession(EngineError):
    pass


class BlockLocked(EngineError):
    pass


class WrongActivityType(EngineError):
    pass
