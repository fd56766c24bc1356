import sys

from semiwf.cli import main

sys.exit(main())
