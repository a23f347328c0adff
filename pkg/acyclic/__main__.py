# acyclic/__main__.py
import sys

from acyclic.cli.commands import main

sys.exit(main())
