import sys

from metaudit.cli import main

sys.exit(main())
