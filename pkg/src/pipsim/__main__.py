import sys

from pipsim.cli import main

sys.exit(main())
