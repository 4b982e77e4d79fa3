"""Utility functions and helpers for the toolkit."""
from utils.errors import PackingError
from utils.logger import setup_logger
from utils.numerics import get_numerics

__all__ = ['PackingError', 'get_numerics', 'setup_logger']
