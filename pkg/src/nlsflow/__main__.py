import sys

from nlsflow.cli import main

sys.exit(main())
