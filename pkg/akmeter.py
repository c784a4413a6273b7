"""Command-line entry point for akmeter.

Usage:
    python akmeter.py derive                              # exact finals and commutators
    python akmeter.py report scenarios/matched.txt        # inequalities for one scenario
    python akmeter.py --backend both report scenarios/matched.txt
    python akmeter.py superposition scenarios/two_packets.txt
    python akmeter.py sweep scenarios/matched.txt --lambdas 0.5,1,2
    python akmeter.py --seed 7 sample scenarios/matched.txt --count 10000
    python akmeter.py check                               # fast invariant suite

Environment:
    AKMETER_THREADS   caps FFT workers and sweep threads (default 1)
    AKMETER_OUTPUT_DIR  where CSV artifacts go (default ./results)
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from src.cli.commands import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
