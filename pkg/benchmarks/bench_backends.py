"""Compare the numba kernels with the numpy fallback.

Usage: python3 benchmarks/bench_backends.py [--periods 40] [--repeats 3] [--json]
"""

import sys

from weakosc.bench import main

if __name__ == "__main__":
    sys.exit(main())
