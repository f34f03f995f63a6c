import sys

from rmtdensity.main import main

sys.exit(main())
