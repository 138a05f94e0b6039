#!/usr/bin/env python3
"""
CES Toolkit v1.0 - Main Launcher
Entry point for the CES partner-model command line:

    python ces_launcher.py spectrum --gamma 1 --epsilon 1 --levels 3
    python ces_launcher.py verify --suite algebra
"""

import sys
from pathlib import Path


def initialize_engine():
    """Add ces-engine to path if needed"""
    engine_path = Path(__file__).resolve().parent / "ces-engine"
    if str(engine_path) not in sys.path:
        sys.path.insert(0, str(engine_path))


def main() -> int:
    initialize_engine()
    try:
        from cli import main as cli_main
    except ImportError as e:
        print(f"[x] CES engine not available: {e}", file=sys.stderr)
        print("[!] Install dependencies with: pip install -r requirements.txt", file=sys.stderr)
        return 2
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
