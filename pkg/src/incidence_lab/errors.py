"""Base exception shared by every laboratory module."""


class LabError(Exception):
    """Base exception for incidence laboratory errors."""
