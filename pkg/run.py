import sys

from qsdp.cli import USAGE, main as cli_main


def main(argv):
    if len(argv) < 2:
        print(USAGE)
        return 1
    return cli_main(argv[1:])


if __name__ == "__main__":
    raise SystemExit(main(sys.argv))
