"""
Error hierarchy for the perception planner.

Library code raises these; the CLI maps them onto exit codes and a one-line
``error[<kind>]: <message>`` diagnostic.
"""


class PlannerError(Exception):
    """Base class for every failure the toolkit reports."""

    exit_code: int = 1
    kind: str = "error"


class InputFormatError(PlannerError):
    """Malformed input document or invalid flag value."""

    exit_code = 2
    kind = "format"


class DomainError(PlannerError):
    """Well-formed input that cannot be processed as asked."""

    exit_code = 1
    kind = "domain"


class TopologyParseError(InputFormatError):
    kind = "topology"


class SimConfigError(InputFormatError):
    kind = "sim-config"


class DepthImageFormatError(InputFormatError):
    kind = "depth-image"


class TableFormatError(InputFormatError):
    kind = "table"


class UnsupportedLevelError(InputFormatError):
    kind = "level"


class ProfileLookupError(InputFormatError, KeyError):
    kind = "profile"

    def __str__(self) -> str:
        # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class InstanceTooLargeError(DomainError):
    kind = "too-large"


class InsufficientDepthDataError(DomainError):
    kind = "insufficient-depth"


class PointOutsideImageError(DomainError):
    kind = "outside-image"


class InsufficientSamplesError(DomainError):
    kind = "samples"


class EmptyClassSetError(DomainError):
    kind = "no-classes"


def describe_validation_error(error) -> str:
    """
    Flatten a pydantic ``ValidationError`` into ``path: message`` items.

    Paths use dotted keys and ``[index]`` for list positions, e.g.
    ``links.usb[2]: unknown sensor id 'cam9'``.
    """
    messages = []
    for item in error.errors():
        message = item["msg"]
        if message.startswith("Value error, "):
            message = message[len("Value error, "):]
        where = ""
        for part in item["loc"]:
            if isinstance(part, int):
                where += f"[{part}]"
            else:
                where += f".{part}" if where else str(part)
        messages.append(f"{where}: {message}" if where else message)
    return "; ".join(messages)
