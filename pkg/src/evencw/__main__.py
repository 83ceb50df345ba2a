import sys

from evencw.cli import main

sys.exit(main())
