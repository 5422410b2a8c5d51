import sys

from envprobe.cli import main

sys.exit(main())
