"""Three interchangeable readers for the stat files.

Scan walks the text once, character by character. Pattern runs one
precompiled regular expression. Split tokenizes with str.split. All three
implement the grammar documented in `ralab.parsers.fixtures` and agree on
every input, accepted or rejected.
"""
import enum
import re
from typing import Callable

from ralab.core.reward import FrameStats
from ralab.errors import ParseFailure

_DIGITS = frozenset("0123456789")

# longest digit runs the grammar accepts
MAX_LEVEL_DIGITS = 3
MAX_COUNTER_DIGITS = 20


class ParserStrategy(str, enum.Enum):
    SCAN = "scan"
    PATTERN = "pattern"
    SPLIT = "split"


# ---------------------------------------------------------------- scan

def _is_blank(ch: str) -> bool:
    return ch != "\n" and ch.isspace()


def scan_state(text: str) -> int:
    n = len(text)
    i = 0

    # header lines
    newlines = 0
    while newlines < 2:
        if i >= n:
            raise ParseFailure("missing interface row")
        if text[i] == "\n":
            newlines += 1
        i += 1

    while i < n and _is_blank(text[i]):
        i += 1

    start = i
    while i < n and text[i] != ":" and not text[i].isspace():
        i += 1
    if i == start:
        raise ParseFailure("missing interface row")
    if i >= n or text[i] != ":":
        raise ParseFailure("interface name not followed by ':'")
    i += 1

    # status, link quality: any non-blank tokens
    for _ in range(2):
        if i >= n or not _is_blank(text[i]):
            raise ParseFailure("missing field before level")
        while i < n and _is_blank(text[i]):
            i += 1
        if i >= n or text[i].isspace():
            raise ParseFailure("missing field before level")
        while i < n and not text[i].isspace():
            i += 1

    if i >= n or not _is_blank(text[i]):
        raise ParseFailure("missing level field")
    while i < n and _is_blank(text[i]):
        i += 1
    if i >= n or text[i].isspace():
        raise ParseFailure("missing level field")

    negative = False
    if text[i] == "-":
        negative = True
        i += 1

    value = 0
    digits = 0
    while i < n and text[i] in _DIGITS:
        value = value * 10 + (ord(text[i]) - 48)
        digits += 1
        i += 1
    if digits == 0:
        raise ParseFailure("non-numeric level")
    if digits > MAX_LEVEL_DIGITS:
        raise ParseFailure("level out of range")

    if i < n and text[i] == ".":
        i += 1
    if i < n and not text[i].isspace():
        raise ParseFailure("non-numeric level")

    return -value if negative else value


def scan_reward(text: str) -> tuple[int, int]:
    n = len(text)
    i = 0
    values = []
    for expected_end in (",", None):
        value = 0
        digits = 0
        while i < n and text[i] in _DIGITS:
            value = value * 10 + (ord(text[i]) - 48)
            digits += 1
            i += 1
        if digits == 0:
            raise ParseFailure("missing counter")
        if digits > MAX_COUNTER_DIGITS:
            raise ParseFailure("counter out of range")
        values.append(value)

        if expected_end == ",":
            if i >= n or text[i] != ",":
                raise ParseFailure("counters not separated by ','")
            i += 1

    if i < n and not (text[i] == "\n" and i + 1 == n):
        raise ParseFailure("trailing characters after counters")
    return values[0], values[1]


# ---------------------------------------------------------------- pattern

_STATE_RE = re.compile(
    r"\A[^\n]*\n[^\n]*\n"
    r"[^\S\n]*[^\s:]+:"
    r"[^\S\n]+\S+"
    r"[^\S\n]+\S+"
    rf"[^\S\n]+(-?[0-9]{{1,{MAX_LEVEL_DIGITS}}})\.?(?=\s|\Z)"
)

_REWARD_RE = re.compile(rf"\A([0-9]{{1,{MAX_COUNTER_DIGITS}}}),([0-9]{{1,{MAX_COUNTER_DIGITS}}})\n?\Z")


def pattern_state(text: str) -> int:
    match = _STATE_RE.match(text)
    if match is None:
        raise ParseFailure("state file does not match the row pattern")
    return int(match.group(1))


def pattern_reward(text: str) -> tuple[int, int]:
    match = _REWARD_RE.match(text)
    if match is None:
        raise ParseFailure("reward file does not match '<successes>,<attempts>'")
    return int(match.group(1)), int(match.group(2))


# ---------------------------------------------------------------- split

def _is_number(token: str, max_digits: int) -> bool:
    return 0 < len(token) <= max_digits and all(ch in _DIGITS for ch in token)


def split_state(text: str) -> int:
    lines = text.split("\n", 3)
    if len(lines) < 3:
        raise ParseFailure("missing interface row")

    fields = lines[2].split()
    if not fields:
        raise ParseFailure("missing interface row")

    name = fields[0]
    if len(name) < 2 or not name.endswith(":") or ":" in name[:-1]:
        raise ParseFailure("interface name not followed by ':'")
    if len(fields) < 4:
        raise ParseFailure("missing level field")

    level = fields[3]
    if level.endswith("."):
        level = level[:-1]
    digits = level[1:] if level.startswith("-") else level
    if not _is_number(digits, MAX_LEVEL_DIGITS):
        raise ParseFailure("non-numeric level")
    return int(level)


def split_reward(text: str) -> tuple[int, int]:
    if text.endswith("\n"):
        text = text[:-1]

    fields = text.split(",")
    if len(fields) != 2:
        raise ParseFailure("reward file must hold exactly two comma separated counters")
    if not (_is_number(fields[0], MAX_COUNTER_DIGITS) and _is_number(fields[1], MAX_COUNTER_DIGITS)):
        raise ParseFailure("non-numeric counter")
    return int(fields[0]), int(fields[1])


# ---------------------------------------------------------------- dispatch

STATE_PARSERS: dict[ParserStrategy, Callable[[str], int]] = {
    ParserStrategy.SCAN: scan_state,
    ParserStrategy.PATTERN: pattern_state,
    ParserStrategy.SPLIT: split_state,
}

REWARD_PARSERS: dict[ParserStrategy, Callable[[str], tuple[int, int]]] = {
    ParserStrategy.SCAN: scan_reward,
    ParserStrategy.PATTERN: pattern_reward,
    ParserStrategy.SPLIT: split_reward,
}


def parse_state(text: str, strategy: ParserStrategy) -> int:
    """Level (RSS, integer dBm) of the first interface row"""
    return STATE_PARSERS[ParserStrategy(strategy)](text)


def parse_reward(text: str, strategy: ParserStrategy) -> FrameStats:
    """Frame counters of a reward file.

    Raises ParseFailure on malformed text and InvariantViolation when
    successes exceed attempts.
    """
    successes, attempts = REWARD_PARSERS[ParserStrategy(strategy)](text)
    return FrameStats(successes=successes, attempts=attempts)
