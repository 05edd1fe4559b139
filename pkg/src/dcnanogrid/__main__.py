import sys

from dcnanogrid.cli import main

sys.exit(main())
