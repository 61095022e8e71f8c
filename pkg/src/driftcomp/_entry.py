"""Console-script entry point.

Applies the DRIFTCOMP_THREADS cap before numpy/numba are imported so
BLAS and JIT thread pools respect it. The cap only limits parallelism;
all reductions run in a fixed order, so results are unaffected.
"""

import os
import sys


def main() -> None:
    threads = os.environ.get("DRIFTCOMP_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                    "NUMBA_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    from .cli import main as cli_main
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
