from ._xbound import __version__, default_rules_text, scan, scan_app, stats

__all__ = ["__version__", "default_rules_text", "scan", "scan_app", "stats"]
