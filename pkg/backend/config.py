import os
from dataclasses import dataclass

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _int_env(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except ValueError:
        return default


@dataclass
class Config:
    """Process-level settings for convlint"""

    # Rule configuration file used when --config is absent (empty means defaults)
    RULE_CONFIG_PATH: str = os.getenv("CONVLINT_CONFIG", "")

    # Output settings
    OUTPUT_FORMAT: str = os.getenv("CONVLINT_FORMAT", "text")  # text or json
    LOG_LEVEL: str = os.getenv("CONVLINT_LOG_LEVEL", "WARNING")

    # Parsing settings
    MAX_WORKERS: int = _int_env("CONVLINT_MAX_WORKERS", 4)  # 1 parses sequentially
    SOURCE_SUFFIX: str = ".minij"
    TEXT_ENCODING: str = "utf-8"


config = Config()
