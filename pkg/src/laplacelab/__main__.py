import sys

from laplacelab.cli import main

sys.exit(main())
