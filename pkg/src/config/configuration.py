from pathlib import Path

from src.utils.utils import read_yaml_file

DEFAULT_CONFIG_PATH = str(Path(__file__).resolve().parents[2] / "config" / "config.yaml")


class Configuration:
    """
    A class to load and access project configuration values from a YAML file.
    """

    def __init__(self, config_file_path: str = DEFAULT_CONFIG_PATH):
        """
        Initialize Configuration by loading the YAML config.

        Args:
            config_file_path (str): Path to the YAML config file.
        """
        self.config_file_path = config_file_path
        self.config = self._load_config(config_file_path)

    def _load_config(self, file_path: str) -> dict:
        """
        Load YAML configuration file.

        Args:
            file_path (str): Path to the config YAML file.

        Returns:
            dict: Loaded config dictionary (empty for an empty file).
        """
        return read_yaml_file(file_path) or {}

    def get_section(self, section_name: str) -> dict:
        """
        Retrieve an entire section from the config.

        Args:
            section_name (str): Name of the config section.

        Returns:
            dict: The section's content.
        """
        return dict(self.config.get(section_name) or {})

    def get_value(self, section_name: str, key: str, default=None):
        """
        Retrieve a specific value from a section in the config.

        Args:
            section_name (str): Section name.
            key (str): Key within the section.
            default: Value returned when the key is absent.

        Returns:
            Any: Value associated with the key or ``default`` if not found.
        """
        section = self.get_section(section_name)
        return section.get(key, default) if section else default
