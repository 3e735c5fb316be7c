import sys

from echkit.cli import main

sys.exit(main())
