import sys

from src.pipeline.cli import cli_main


if __name__ == '__main__':
    # Same entry point as the installed `varselect` console script
    sys.exit(cli_main(sys.argv[1:]))
