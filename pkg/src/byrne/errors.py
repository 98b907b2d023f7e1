"""Base exception for everything this package raises on purpose."""


class ByrneError(Exception):
    pass
