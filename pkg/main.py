import sys

from app.cli import main as cli_main
from app.config import load_settings
from app.errors import UsageError
from app.logger_config import setup_logger


def main():
    """Main entry point for the UMR toolkit."""
    try:
        settings = load_settings()
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        sys.exit(1)

    # Set up logging
    logger = setup_logger(level=settings.log_level, log_file=settings.log_file)
    logger.debug(f"Starting umr-tools with {sys.argv[1:]}")

    try:
        sys.exit(cli_main(sys.argv[1:]))
    except KeyboardInterrupt:
        logger.info("Stopped by user")
        sys.exit(130)


if __name__ == "__main__":
    main()
