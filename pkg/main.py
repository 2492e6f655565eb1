"""
levelforge - Main Entry Point

Exact verification of full level structures on Oort–Tate group schemes.
Each subcommand recomputes one published or derived fact and prints a report.
"""

import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))


def main() -> int:
    """Main application entry point."""
    try:
        from cli import main as run_cli
    except ImportError as e:
        print(f"Error importing required modules: {e}", file=sys.stderr)
        print("\nPlease install dependencies with:", file=sys.stderr)
        print("pip install -r requirements.txt", file=sys.stderr)
        return 2
    return run_cli()


if __name__ == "__main__":
    sys.exit(main())
