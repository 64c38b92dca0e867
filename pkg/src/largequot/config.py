"""Runtime configuration: caps, seed, output plumbing.

Settings come from (later wins): built-in defaults, a key=value config file
named by the ``LARGEQUOT_CONFIG`` environment variable or ``--config``, and
explicit overrides.  The seed is recorded in every emitted document so runs
can be replayed byte for byte.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

ENV_CONFIG_PATH = "LARGEQUOT_CONFIG"

_INT_FIELDS = {
    "enumeration_cap",
    "term_cap",
    "coset_cap",
    "depth_cap",
    "truncation_cap",
    "seed",
    "verbosity",
}
_CAP_FIELDS = {
    "enumeration_cap",
    "term_cap",
    "coset_cap",
    "depth_cap",
    "truncation_cap",
}


@dataclass(frozen=True)
class Config:
    enumeration_cap: int = 10**6
    term_cap: int = 10**6
    coset_cap: int = 10**4
    depth_cap: int = 16
    truncation_cap: int = 64
    seed: int = 0
    verbosity: int = 0
    output: str | None = None

    def __post_init__(self):
        for name in _CAP_FIELDS:
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not isinstance(self.seed, int):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")

    def to_doc(self):
        """The slice of the configuration every output document records."""
        return {
            "seed": self.seed,
            "caps": {
                "enumeration": self.enumeration_cap,
                "term": self.term_cap,
                "coset": self.coset_cap,
                "depth": self.depth_cap,
                "truncation": self.truncation_cap,
            },
        }


_FIELD_NAMES = {f.name for f in fields(Config)}


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines; '#' starts a comment, blanks ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key or not value:
            raise ValueError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        if key not in _FIELD_NAMES:
            raise ValueError(f"{source}:{lineno}: unknown setting {key!r}")
        if key in _INT_FIELDS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ValueError(
                    f"{source}:{lineno}: {key} needs an integer, got {value!r}"
                ) from None
        else:
            values[key] = value
    return values


def load_config(path=None, overrides=None):
    """Build a :class:`Config` from defaults, file and overrides, in order.

    When ``path`` is None the ``LARGEQUOT_CONFIG`` environment variable is
    consulted; a missing explicit path is an error, a missing variable is
    not.
    """
    values = {}
    if path is None:
        path = os.environ.get(ENV_CONFIG_PATH)
    if path:
        with open(path, encoding="utf-8") as handle:
            values.update(parse_config_text(handle.read(), source=path))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return Config(**values)
