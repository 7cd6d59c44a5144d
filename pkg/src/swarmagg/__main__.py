import sys

from swarmagg.cli import main

sys.exit(main())
