#!/usr/bin/env python3
"""Entry point: python main.py <command> --config PATH [overrides]."""

import sys

from core.harness import run_cli


if __name__ == "__main__":
    sys.exit(run_cli(sys.argv[1:]))
