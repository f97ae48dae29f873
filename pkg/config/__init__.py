"""Configuration package.

`config.settings.AppConfig` reads NULLSQL_* variables (optionally from
config/.env) and turns them into generator bounds, a seed and a log path.
"""
