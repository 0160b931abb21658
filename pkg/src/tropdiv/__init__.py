"""Divisor theory on vertex-weighted metric graphs."""
