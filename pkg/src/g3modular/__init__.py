"""Exact q-expansion toolkit for plane quartic models of genus-3 modular curves."""

__version__ = "0.1.0"
