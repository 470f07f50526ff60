"""
Configuration Module
Central settings: audit-log location, enumeration bounds, CLI defaults
and exit codes.
"""

import os
from pathlib import Path

# Base directory (project root)
BASE_DIR = Path(__file__).resolve().parent.parent

# Audit log database; CSTERM_DB_PATH overrides the default location
DB_PATH = os.environ.get("CSTERM_DB_PATH", os.path.join(BASE_DIR, "data", "audit.sqlite"))

# Payload values used when enumerating terms
ENUM_PAYLOADS = (0, 1)

# CLI defaults
DEFAULT_MAX_NODES = 3
DEFAULT_UNFOLD_DEPTH = 3
DEFAULT_USER = "cli"

# Exit codes
EXIT_OK = 0
EXIT_TYPE_ERROR = 1
EXIT_USAGE_ERROR = 2


class ConfigManager:
    """Manages application configuration."""

    def __init__(self):
        """Initialize config manager."""
        self.db_path = DB_PATH
        self.enum_payloads = ENUM_PAYLOADS
        self.default_max_nodes = DEFAULT_MAX_NODES
        self.default_unfold_depth = DEFAULT_UNFOLD_DEPTH
        self.default_user = DEFAULT_USER

    def get_config(self, key):
        """Get configuration value by key."""
        config_map = {
            'db_path': self.db_path,
            'enum_payloads': self.enum_payloads,
            'default_max_nodes': self.default_max_nodes,
            'default_unfold_depth': self.default_unfold_depth,
            'default_user': self.default_user,
        }
        return config_map.get(key)
