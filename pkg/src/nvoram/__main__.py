import sys

from nvoram.cli import main

sys.exit(main())
