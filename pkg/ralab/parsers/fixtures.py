"""Renderers for the two stat files and the seeded fuzz corpus.

State file (modelled on the Linux wireless status table)::

    Inter-| sta-|   Quality        |   Discarded packets               | Missed | WE
     face | tus | link level noise |  nwid  crypt   frag  retry   misc | beacon | 22
     wlan0: 0000   54.  -56.  -256        0      0      0      0      0        0

Two header lines, then one row per interface: ``name:``, hex status, link
quality, level (RSS in integer dBm with a trailing period), noise and six
counters. Readers take the level of the first row.

Grammar honoured by every parser (lines split on ``\\n`` only, blanks are the
characters for which ``str.isspace`` holds)::

    file  := LINE "\\n" LINE "\\n" row ("\\n" ...)?
    row   := blank* NAME ":" blank+ TOKEN blank+ TOKEN blank+ LEVEL (blank rest | end)
    NAME  := one or more characters, neither blank nor ":"
    TOKEN := one or more non-blank characters
    LEVEL := "-"? [0-9]{1,3} "."?

Reward file: ``<successes>,<attempts>`` then an optional ``\\n``, each counter
1 to 20 ASCII digits, no padding.
"""
import math

import numpy as np

from ralab.core.reward import FrameStats
from ralab.core.state import RSS_MAX_DBM, RSS_MIN_DBM, LinkObservation

STATE_HEADER = ("Inter-| sta-|   Quality        |   Discarded packets               | Missed | WE\n"
                " face | tus | link level noise |  nwid  crypt   frag  retry   misc | beacon | 22\n")

DEFAULT_INTERFACE = "wlan0"


def _state_row(interface: str, level: int, rng: np.random.Generator) -> str:
    quality = min(max(level + 110, 0), 70)
    counters = rng.integers(0, 100_000, size=6)
    nwid, crypt, frag, retry, misc, beacon = (int(c) for c in counters)
    return (f"{interface:>6}: 0000   {quality:>2}.  {level:>4}.  -256 "
            f"{nwid:>8} {crypt:>6} {frag:>6} {retry:>6} {misc:>6} {beacon:>8}\n")


def render_state_file(obs: LinkObservation, rng: np.random.Generator,
                      interface: str = DEFAULT_INTERFACE,
                      extra_interfaces: tuple[str, ...] = ()) -> str:
    """State file whose first row carries floor(obs.rss_dbm) as its level.

    The counter columns are decoration drawn from `rng`.
    """
    level = math.floor(obs.rss_dbm)
    text = STATE_HEADER + _state_row(interface, level, rng)
    for extra in extra_interfaces:
        other = int(rng.integers(RSS_MIN_DBM, RSS_MAX_DBM + 1))
        text += _state_row(extra, other, rng)
    return text


def render_reward_file(stats: FrameStats) -> str:
    return f"{stats.successes},{stats.attempts}\n"


# characters the fuzzer may insert: every token class of both grammars
FUZZ_ALPHABET = "0123456789-.,: \t\nabwlxyz"


def valid_state_corpus(size: int, seed: int) -> list[tuple[str, int]]:
    """`size` valid state files with the level each one must parse to"""
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(size):
        rss = float(rng.uniform(RSS_MIN_DBM, RSS_MAX_DBM + 1))
        obs = LinkObservation(rss_dbm=rss)
        extras = tuple(f"wlan{k}" for k in range(1, int(rng.integers(0, 3)) + 1))
        corpus.append((render_state_file(obs, rng, extra_interfaces=extras), math.floor(obs.rss_dbm)))
    return corpus


def valid_reward_corpus(size: int, seed: int) -> list[tuple[str, FrameStats]]:
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(size):
        attempts = int(rng.integers(0, 10**9))
        successes = int(rng.integers(0, attempts + 1))
        stats = FrameStats(successes=successes, attempts=attempts)
        text = render_reward_file(stats)
        if rng.random() < 0.5:
            text = text.rstrip("\n")
        corpus.append((text, stats))
    return corpus


def mutate(text: str, rng: np.random.Generator, edits: int = 2) -> str:
    """Random insertions, deletions and replacements drawn from FUZZ_ALPHABET"""
    chars = list(text)
    for _ in range(edits):
        op = int(rng.integers(0, 3))
        pos = int(rng.integers(0, len(chars) + 1))
        symbol = FUZZ_ALPHABET[int(rng.integers(0, len(FUZZ_ALPHABET)))]
        if op == 0 or not chars:
            chars.insert(pos, symbol)
        elif op == 1:
            del chars[min(pos, len(chars) - 1)]
        else:
            chars[min(pos, len(chars) - 1)] = symbol
    return "".join(chars)


def fuzz_corpus(texts: list[str], size: int, seed: int) -> list[str]:
    """`size` mutants of `texts`, a mix of still-valid and broken inputs"""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        base = texts[int(rng.integers(0, len(texts)))]
        out.append(mutate(base, rng, edits=int(rng.integers(1, 4))))
    return out
