#!/usr/bin/env python3
"""
Setup script for levelforge.
"""

import subprocess
import sys
from pathlib import Path


def check_python_version():
    """Check if Python version is 3.9 or higher."""
    if sys.version_info < (3, 9):
        print("Python 3.9 or higher is required.")
        print(f"Current version: {sys.version}")
        return False
    print(f"Python version: {sys.version_info.major}.{sys.version_info.minor}")
    return True


def install_dependencies():
    """Install Python dependencies."""
    print("Installing Python dependencies...")

    try:
        subprocess.check_call([
            sys.executable, "-m", "pip", "install", "-r", "requirements.txt"
        ])
        print("Dependencies installed.")
        return True
    except subprocess.CalledProcessError as e:
        print(f"Error installing dependencies: {e}")
        return False


def setup_environment():
    """Write a default .env with the Gröbner budgets."""
    env_file = Path(".env")
    if not env_file.exists():
        env_content = """# levelforge configuration
LEVELFORGE_BUDGET_PAIRS=200000
LEVELFORGE_BUDGET_DEGREE=64
LEVELFORGE_BUDGET_SECONDS=0
LEVELFORGE_LOG_LEVEL=WARNING
LEVELFORGE_JOBS=1
LEVELFORGE_RUN_SLOW_TESTS=false
"""
        env_file.write_text(env_content)
        print("Created .env configuration file")
    else:
        print("Configuration file already exists")


def run_smoke_check():
    """Import the packages and run the cheapest subcommand."""
    try:
        from cli import main as run_cli
        from config import Config

        print(f"levelforge engine {Config.ENGINE_VERSION}")
        return run_cli(["teichmuller", "--p", "3", "--n", "2", "--no-timings"]) == 0
    except ImportError as e:
        print(f"Import error: {e}")
        return False


def main():
    """Main setup function."""
    print("levelforge setup")
    print("=" * 40)

    if not check_python_version():
        sys.exit(1)

    if not install_dependencies():
        print("Setup failed at dependency installation")
        sys.exit(1)

    setup_environment()

    if run_smoke_check():
        print("\nSetup completed.")
        print("\nTry:")
        print("  python main.py flatness --p 2")
        print("  python -m pytest tests/")
    else:
        print("\nSetup completed with warnings.")


if __name__ == "__main__":
    main()
