"""Allow `python -m faultwave` as an alternative to the console script."""

from .cli import main

main()
