import sys

from .domain_keywords.cli.commands import main

sys.exit(main())
