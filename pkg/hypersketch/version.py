"""Single source of truth for hypersketch version."""

VERSION = "0.4.0"
