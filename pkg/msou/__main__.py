import sys

from msou.cli import main

sys.exit(main())
