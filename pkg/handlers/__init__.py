"""Command-line subcommand handlers."""
