import sys

from peh.cli import main

sys.exit(main())
