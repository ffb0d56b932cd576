import sys

from farkascert.cli import main

sys.exit(main())
