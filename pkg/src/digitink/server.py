"""Local HTTP inference service.

Models load once at startup (and must pass the structural audit); request
handling only reads them, so concurrent identical requests return
identical responses.  The drawing UI posts the growing stroke list as
plain JSON; errors come back as {code, message}.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import __version__, checkpoint
from .errors import DegenerateStrokeError
from .features import Preprocessor
from .models import ModelSpec, require_audit
from .nn.network import Network
from .strokes import Glyph, Stroke, TouchPoint, glyph_arclength
from .training import preprocessor_for


@dataclass
class LoadedModel:
    name: str
    spec: ModelSpec
    network: Network
    preprocessor: Preprocessor
    class_median_arclength: list[float]


def load_model(path) -> LoadedModel:
    ckpt = checkpoint.load(path)
    require_audit(ckpt.model)
    return LoadedModel(
        name=ckpt.model.name,
        spec=ckpt.model,
        network=ckpt.build_network(),
        preprocessor=preprocessor_for(ckpt),
        class_median_arclength=list(
            ckpt.normalization.get("class_median_arclength", [0.0] * 10)
        ),
    )


def _error(status: int, code: str, message: str):
    return status, {"code": code, "message": message}


def parse_request(models: dict[str, LoadedModel], body) -> tuple[int, dict] | Glyph:
    """Validate a request body; returns the glyph or an (status, error)."""
    if not isinstance(body, dict):
        return _error(400, "invalid_body", "request body must be a JSON object")
    name = body.get("model")
    if name not in models:
        return _error(
            400, "unknown_model", f"model {name!r} not loaded (have {sorted(models)})"
        )
    strokes = body.get("strokes")
    if not isinstance(strokes, list) or not strokes or any(
        not isinstance(s, list) or not s for s in strokes
    ):
        return _error(400, "empty_strokes", "strokes must be a non-empty list of non-empty lists")
    parsed = []
    for si, stroke in enumerate(strokes):
        pts = []
        last_t = -math.inf
        for pi, p in enumerate(stroke):
            if not isinstance(p, dict) or not {"x", "y", "t"} <= p.keys():
                return _error(400, "bad_point", f"strokes[{si}][{pi}] must have x, y, t")
            try:
                x, y, t = float(p["x"]), float(p["y"]), float(p["t"])
            except (TypeError, ValueError):
                return _error(400, "bad_point", f"strokes[{si}][{pi}] has non-numeric fields")
            if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(t)):
                return _error(400, "bad_point", f"strokes[{si}][{pi}] has non-finite fields")
            if t < last_t:
                return _error(
                    400, "bad_timestamps", f"strokes[{si}] timestamps must be nondecreasing"
                )
            last_t = t
            pts.append(TouchPoint(x, y, t))
        parsed.append(Stroke(pts))
    return Glyph(strokes=parsed)


def run_inference(models: dict[str, LoadedModel], body) -> tuple[int, dict]:
    """The full request -> response path, independent of the HTTP layer."""
    parsed = parse_request(models, body)
    if isinstance(parsed, tuple):
        return parsed
    model = models[body["model"]]
    try:
        x = model.preprocessor.glyph_to_input(parsed)
    except DegenerateStrokeError:
        return _error(422, "insufficient_input", "need at least two distinct touch points")
    probs = model.network.predict_proba(x)
    top = int(np.argmax(probs))
    median = model.class_median_arclength[top]
    hint = 1.0 if median <= 0 else min(glyph_arclength(parsed) / median, 1.0)
    return 200, {
        "probabilities": [float(p) for p in probs],
        "top": top,
        "completion_hint": hint,
    }


def create_app(models: dict[str, LoadedModel], static_dir=None):
    from fastapi import FastAPI, Request
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse

    app = FastAPI(title="digitink inference service", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/api/health")
    def health():
        return {"status": "ok", "models": sorted(models), "version": __version__}

    @app.post("/api/infer")
    async def infer(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse(
                status_code=400,
                content={"code": "invalid_json", "message": "body must be valid JSON"},
            )
        status, payload = run_inference(models, body)
        return JSONResponse(status_code=status, content=payload)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app


def serve(checkpoint_paths: list, bind: str = "127.0.0.1:8720", static_dir=None) -> None:
    """Load checkpoints (each must pass audit), then block serving HTTP."""
    import uvicorn

    models: dict[str, LoadedModel] = {}
    for path in checkpoint_paths:
        model = load_model(path)
        if model.name in models:
            raise ValueError(f"duplicate checkpoint for model {model.name}")
        models[model.name] = model
    if not models:
        raise ValueError("no checkpoints given")
    host, _, port = bind.rpartition(":")
    app = create_app(models, static_dir=static_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="info")
