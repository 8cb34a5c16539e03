"""Certification toolkit for nonresonance of u'' + a(x) u = 0, u'(0) = u'(L) = 0."""

__version__ = "0.1.0"
