"""Run every INI config under configs/ through the CLI and report exit codes."""

import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    failures = 0
    for cfg in sorted((ROOT / "configs").glob("*.cfg")):
        proc = subprocess.run([sys.executable, "-m", "semiwf", "run", str(cfg)], capture_output=True, text=True)
        print(f"{cfg.name:24s} exit={proc.returncode}")
        if proc.returncode == 1 and cfg.stem != "bad_eps":
            failures += 1
            print(proc.stderr.strip())
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
