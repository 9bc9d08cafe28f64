from remn.cli import main
import sys

sys.exit(main())
