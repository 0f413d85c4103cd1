"""Command-line interface: ``teamrules gen|fit|sweep|report``."""
