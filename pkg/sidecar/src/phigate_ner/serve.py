"""Entry point: pick a backend from flags and serve the protocol."""

from __future__ import annotations

import argparse

from .backends import LexicalBackend, TransformerBackend, load_label_map
from .service import create_app


def build_backend(model_path: str | None, label_map_path: str | None, min_score: float):
    if model_path:
        label_map = load_label_map(label_map_path) if label_map_path else None
        return TransformerBackend(model_path=model_path, label_map=label_map, min_score=min_score)
    return LexicalBackend()


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description="Contextual PHI detector service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=9090)
    parser.add_argument("--model", default=None, help="token-classification checkpoint path")
    parser.add_argument("--label-map", default=None, help="JSON file: model label -> category")
    parser.add_argument("--min-score", type=float, default=0.5)
    args = parser.parse_args(argv)

    import uvicorn

    backend = build_backend(args.model, args.label_map, args.min_score)
    uvicorn.run(create_app(backend), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
