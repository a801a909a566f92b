import sys

from pldc.cli import main

sys.exit(main())
