import sys

from voicesim.cli.main import main

sys.exit(main())
