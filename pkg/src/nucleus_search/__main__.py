"""Allow ``python -m nucleus_search`` to run the command-line harness."""

from .cli import main

if __name__ == "__main__":
    main()
