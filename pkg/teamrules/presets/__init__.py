"""Shipped experiment presets, resolved by name with ``--preset``."""
