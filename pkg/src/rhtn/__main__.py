from rhtn.cli import main
import sys

sys.exit(main())
