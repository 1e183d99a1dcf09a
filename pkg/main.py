import sys

from ralabapp import main

if __name__ == "__main__":
    sys.exit(main())
