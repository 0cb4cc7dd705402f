"""Shared pytest setup: repository root on sys.path, the slow marker."""

import sys
from pathlib import Path

# Add parent to path
sys.path.insert(0, str(Path(__file__).parent.parent))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: builds the order-64 table or samples large graphs")
