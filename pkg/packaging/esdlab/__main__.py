import sys

from esdlab.cli import main

sys.exit(main())
