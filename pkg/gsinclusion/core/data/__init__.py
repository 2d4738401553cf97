"""Report input/output helpers."""
