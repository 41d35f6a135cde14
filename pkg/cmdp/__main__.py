import sys

from cmdp.app.cli import main


sys.exit(main())
