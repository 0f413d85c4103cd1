"""Tests for teamrules; table reproductions are marked ``slow``."""
