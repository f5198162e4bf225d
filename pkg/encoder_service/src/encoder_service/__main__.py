"""Run the service: python -m encoder_service --model <path-or-id> [--port N]."""

import argparse

import uvicorn

from .app import create_app
from .config import ServiceConfig


def main() -> None:
    ap = argparse.ArgumentParser(description="encoder service")
    ap.add_argument("--model", required=True, help="model directory or hub id")
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8901)
    ap.add_argument("--max-tokens", type=int, default=512)
    ap.add_argument("--summary-mode", choices=("mean", "cls"), default="mean")
    ap.add_argument("--device", default="cpu")
    args = ap.parse_args()

    config = ServiceConfig(
        model_path=args.model,
        host=args.host,
        port=args.port,
        max_tokens=args.max_tokens,
        summary_mode=args.summary_mode,
        device=args.device,
    )
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


if __name__ == "__main__":
    main()
