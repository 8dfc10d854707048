import sys

from fracton.main import main

sys.exit(main())
