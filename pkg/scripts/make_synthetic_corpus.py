#!/usr/bin/env python3
"""
Synthetic gait corpus generator.

Writes 19-column record files named in the public corpus convention
(<Group><Co|Pt><NN>_01.txt) plus a demographics.csv, so that the full
ingest -> train -> eval pipeline can run without the public data.

Usage:
    python scripts/make_synthetic_corpus.py --out-dir data/synthetic
    python scripts/make_synthetic_corpus.py --out-dir data/synthetic --subjects-per-class 6 --seed 3
    gaitstage ingest --data-dir data/synthetic --demographics data/synthetic/demographics.csv
"""

import argparse
import logging
import sys

from gaitstage.errors import GaitStageError
from gaitstage.ingest import write_synthetic_corpus

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)


def main() -> int:
    """Main entry point."""
    parser = argparse.ArgumentParser(
        description="Write a synthetic gait force corpus with demographics",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--out-dir", required=True, help="Directory to write records into")
    parser.add_argument(
        "--subjects-per-class",
        type=int,
        default=3,
        help="Synthetic subjects per class (default 3)",
    )
    parser.add_argument(
        "--frames",
        type=int,
        default=1200,
        help="Frames per record at 100 Hz (default 1200, i.e. 2 windows of 500)",
    )
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default 0)")
    parser.add_argument(
        "--noise",
        type=float,
        default=0.05,
        help="Gaussian noise relative to the peak force (default 0.05)",
    )
    args = parser.parse_args()

    try:
        demographics = write_synthetic_corpus(
            args.out_dir,
            subjects_per_class=args.subjects_per_class,
            frames_per_record=args.frames,
            seed=args.seed,
            noise=args.noise,
        )
    except GaitStageError as e:
        logger.error(str(e))
        return e.exit_code

    print(f"Demographics: {demographics}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
