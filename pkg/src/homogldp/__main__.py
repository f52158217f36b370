import sys

from homogldp.cli import main

sys.exit(main())
