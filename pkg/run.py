#!/usr/bin/env python3
import sys

from g2scale.gallery import available_examples
from g2scale.main import EXIT_OK, run


def run_all(points="5"):
    print("Running the project checks...", file=sys.stderr)
    codes = [run(["selftest", "--scale", "0.1"])]
    for name in available_examples():
        codes.append(run(["--points", points, "gallery", "verify", name]))
    print("Project complete.", file=sys.stderr)
    return max(codes) if codes else EXIT_OK


if __name__ == "__main__":
    sys.exit(run_all(*sys.argv[1:2]))
