"""Shortcut-set lower-bound instances, verifiers and shortcut algorithms."""
