"""Configurable word lists backing the lexical lint rules.

Matching is case-insensitive and whole-word; multi-word entries match as
phrases with any run of whitespace between tokens. Defaults can be
replaced per set through a plain-text override file with ``[section]``
headers, one term per line and ``#`` comments (see FORMAT.md).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass(frozen=True)
class Lexicons:
    vague_adverbs: frozenset[str]
    communication_technologies: frozenset[str]
    ui_devices: frozenset[str]
    sensing_devices: frozenset[str]
    event_verbs: frozenset[str]

    def __post_init__(self) -> None:
        for f in fields(self):
            if not getattr(self, f.name):
                raise ValueError(f"lexicon {f.name} must not be empty")


# Seeds for the vague-adverb set come from the checklist hint (probably,
# possibly, supposedly); the extensions are common hedging adverbs.
DEFAULT_LEXICONS = Lexicons(
    vague_adverbs=frozenset({
        "probably", "possibly", "supposedly", "perhaps", "maybe", "likely",
        "apparently", "presumably", "roughly", "approximately", "eventually",
    }),
    communication_technologies=frozenset({
        "bluetooth", "intranet", "internet", "wifi", "wi-fi", "zigbee", "nfc",
        "lora", "lorawan", "ethernet", "cellular", "3g", "4g", "5g", "rfid",
        "mqtt", "satellite link",
    }),
    ui_devices=frozenset({
        "dashboard", "smartphone", "tablet", "smartwatch", "monitor",
        "display", "screen", "mobile app", "web portal", "kiosk",
    }),
    sensing_devices=frozenset({
        "sensor", "sensors", "camera", "qr code reader", "barcode scanner",
        "rfid reader", "thermometer", "accelerometer", "gps tracker", "gps",
        "actuator", "actuators", "collar", "drone", "meter", "probe",
    }),
    event_verbs=frozenset({
        "send", "sends", "sent", "receive", "receives", "notify", "notifies",
        "alert", "alerts", "activate", "activates", "deactivate",
        "deactivates", "turn on", "turns on", "turn off", "turns off",
        "detect", "detects", "measure", "measures", "collect", "collects",
        "transmit", "transmits", "upload", "uploads", "report", "reports",
        "record", "records", "trigger", "triggers",
    }),
)

_LEXICON_NAMES = {f.name for f in fields(Lexicons)}


def load_lexicons(path: str | Path, base: Lexicons = DEFAULT_LEXICONS) -> Lexicons:
    """Read an override file; each ``[name]`` section replaces that set."""
    sets: dict[str, set[str]] = {}
    section: str | None = None
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _LEXICON_NAMES:
                raise ValueError(f"{path}:{line_no}: unknown lexicon section [{section}]")
            sets.setdefault(section, set())
            continue
        if section is None:
            raise ValueError(f"{path}:{line_no}: term outside any [section]")
        sets[section].add(" ".join(line.split()).lower())
    values = {f.name: getattr(base, f.name) for f in fields(Lexicons)}
    for name, terms in sets.items():
        values[name] = frozenset(terms)
    return Lexicons(**values)


def compile_terms(terms: frozenset[str]) -> re.Pattern[str]:
    """Whole-word/phrase matcher over a term set; longest terms first so
    phrases win over their own sub-words."""
    ordered = sorted(terms, key=lambda t: (-len(t), t))
    parts = [re.escape(t).replace(r"\ ", r"\s+") for t in ordered]
    return re.compile(r"(?<!\w)(?:" + "|".join(parts) + r")(?!\w)", re.IGNORECASE)


def find_terms(pattern: re.Pattern[str], text: str) -> list[tuple[str, int]]:
    """All (matched-term, 0-based offset) pairs, normalized to lower case."""
    return [(" ".join(m.group(0).split()).lower(), m.start()) for m in pattern.finditer(text)]
