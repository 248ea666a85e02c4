import sys

from p2lab.cli import main

sys.exit(main())
