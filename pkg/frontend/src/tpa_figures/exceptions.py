"""Errors raised while turning sweep exports into figures."""


class FigureError(Exception):
    """Base class for figure-rendering failures."""


class SchemaError(FigureError):
    """The input CSV does not match the expected column schema."""


class EmptySelection(FigureError):
    """The row filter for the requested figure kind matched nothing."""
