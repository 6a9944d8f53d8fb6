import sys

from loqckit.cli import main

sys.exit(main())
