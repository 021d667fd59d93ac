"""
Startup script for the p-capacity command-line tool.

Puts src/ on the path so the package runs straight from a checkout:

    python run_pcap.py classify specs/r3.json --p 2

A .env file at the project root is picked up by the configured factories.
"""

import sys
from pathlib import Path


def setup_environment():
    """Add the src directory to the Python path"""
    src_dir = Path(__file__).parent / "src"
    if str(src_dir) not in sys.path:
        sys.path.insert(0, str(src_dir))


def main() -> int:
    """Main startup function"""
    setup_environment()
    from pcapacity.main import main as cli_main

    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
