import sys

from modzeta.cli import main

sys.exit(main())
