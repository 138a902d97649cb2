import logging
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

from core.config import settings  # noqa: E402
from cli import dispatch  # noqa: E402


# Configure logging
logging.basicConfig(
    level=settings.log_level.upper(),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``l4wb`` command."""
    logger.debug(f"Starting {settings.app_name}")
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
