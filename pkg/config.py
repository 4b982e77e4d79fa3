"""
Configuration module for the Eisenstein packing-bounds toolkit.

Loads configuration from environment variables with fallback to defaults.
"""
import logging
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Logging Configuration
LOG_LEVEL_STR: str = os.getenv("LOG_LEVEL", "INFO").upper()
LOG_LEVEL: int = getattr(logging, LOG_LEVEL_STR, logging.INFO)
LOG_FILE: Optional[Path] = Path(os.getenv("LOG_FILE")) if os.getenv("LOG_FILE") else None

# Search Settings
PACKING_THREADS: int = int(os.getenv("PACKING_THREADS", "1"))
if PACKING_THREADS < 1:
    raise ValueError("PACKING_THREADS must be at least 1!")

# Desk-scale construction limits
ENUMERATION_CAP: int = int(os.getenv("ENUMERATION_CAP", "4096"))
ENUMERATION_CHUNK: int = int(os.getenv("ENUMERATION_CHUNK", "200000"))
if ENUMERATION_CAP < 1 or ENUMERATION_CHUNK < 1:
    raise ValueError("ENUMERATION_CAP and ENUMERATION_CHUNK must be positive!")

# Numerics
EXTENDED_DPS: int = int(os.getenv("EXTENDED_DPS", "40"))
if EXTENDED_DPS < 30:
    raise ValueError("EXTENDED_DPS must be at least 30 digits!")
PRECISION_DROP_LOG2: int = int(os.getenv("PRECISION_DROP_LOG2", "70"))

# Output
OUTPUT_FORMAT: str = os.getenv("OUTPUT_FORMAT", "json").lower()
if OUTPUT_FORMAT not in ("json", "csv", "text"):
    raise ValueError(f"Unsupported OUTPUT_FORMAT: {OUTPUT_FORMAT}")
