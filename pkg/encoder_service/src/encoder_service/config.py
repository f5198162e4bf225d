"""Service configuration."""

from dataclasses import dataclass

SUMMARY_MODES = ("mean", "cls")


class ServiceConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    """Which model to mount and how requests are bounded.

    max_tokens is the hard sequence-length cap the service enforces; requests
    may ask for less but never more. It must fit the mounted model's position
    limit, which is checked when the model is loaded.
    """

    model_path: str
    port: int = 8901
    host: str = "127.0.0.1"
    max_tokens: int = 512
    device: str = "cpu"
    summary_mode: str = "mean"  # single-record summary: mean of tokens or [CLS]

    def __post_init__(self):
        if not self.model_path:
            raise ServiceConfigError("model_path is required")
        if not (0 < self.port < 65536):
            raise ServiceConfigError(f"port {self.port} out of range")
        # 3 special positions + 1 content token per side is the minimum pair
        if self.max_tokens < 5:
            raise ServiceConfigError("max_tokens must be at least 5")
        if self.summary_mode not in SUMMARY_MODES:
            raise ServiceConfigError(
                f"summary_mode must be one of {SUMMARY_MODES}, got {self.summary_mode!r}"
            )
