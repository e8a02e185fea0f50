"""The live preview service.

HTTP serves the client app and the latest document; WebSocket subscribers
get every published DSL update. New DSL arrives from the compile
endpoint, the publish endpoint, or a watched file.
"""

from __future__ import annotations

import asyncio
import contextlib
import tempfile
from pathlib import Path

from fastapi import FastAPI, File, HTTPException, UploadFile, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, Response

from ..dsl import DslError, emit_html, parse, serialize
from ..mlp import MlpParams
from ..pipeline import run_pipeline
from .hub import BroadcastHub
from .models import CompileResponse, HealthResponse, PublishResponse, UpdateMessage

_STATIC = Path(__file__).parent / "static"


def create_app(
    checkpoint: MlpParams | str | None = None,
    watch_path: str | None = None,
    static_dir: str | None = None,
    queue_size: int = 16,
    watch_interval: float = 0.3,
) -> FastAPI:
    hub = BroadcastHub(queue_size=queue_size)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = None
        if watch_path:
            task = asyncio.create_task(_watch_file(app, Path(watch_path), watch_interval))
        yield
        if task:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(title="sketch2site preview service", lifespan=lifespan)
    app.state.hub = hub
    app.state.checkpoint = checkpoint
    app.state.static_dir = Path(static_dir) if static_dir else _STATIC
    app.state.watch_error = None

    async def _watch_file(app: FastAPI, path: Path, interval: float):
        last_mtime = None
        while True:
            await asyncio.sleep(interval)
            try:
                mtime = path.stat().st_mtime_ns
            except FileNotFoundError:
                continue
            if mtime == last_mtime:
                continue
            last_mtime = mtime
            try:
                doc = parse(path.read_text())
            except (DslError, OSError) as err:
                app.state.watch_error = str(err)
                continue
            app.state.watch_error = None
            await hub.publish(serialize(doc))

    @app.get("/", response_class=HTMLResponse)
    def index():
        page = app.state.static_dir / "index.html"
        if not page.is_file():
            raise HTTPException(404, "client app not found")
        return page.read_text()

    @app.get("/latest.wire.json")
    def latest():
        if hub.latest is None:
            raise HTTPException(404, "nothing published yet")
        return Response(content=hub.latest[1], media_type="application/json")

    @app.get("/healthz", response_model=HealthResponse)
    def healthz():
        return HealthResponse(
            status="ok" if app.state.watch_error is None else f"watch error: {app.state.watch_error}",
            seq=hub.seq,
            clients=hub.client_count,
            has_doc=hub.latest is not None,
        )

    @app.post("/publish", response_model=PublishResponse)
    async def publish(doc: dict):
        try:
            from ..dsl import _from_obj

            parsed = _from_obj(doc)
        except DslError as err:
            raise HTTPException(400, f"malformed DSL: {err}") from err
        seq = await hub.publish(serialize(parsed))
        return PublishResponse(seq=seq)

    @app.post("/compile", response_model=CompileResponse)
    async def compile_image(image: UploadFile = File(...), emit: bool = False):
        if app.state.checkpoint is None:
            raise HTTPException(503, "no classifier checkpoint configured")
        data = await image.read()
        with tempfile.NamedTemporaryFile(suffix=".png", delete=False) as tmp:
            tmp.write(data)
            tmp_path = tmp.name
        try:
            doc = await asyncio.get_event_loop().run_in_executor(
                None, run_pipeline, tmp_path, app.state.checkpoint
            )
        except Exception as err:
            raise HTTPException(422, f"could not compile image: {err}") from err
        finally:
            Path(tmp_path).unlink(missing_ok=True)
        text = serialize(doc)
        seq = await hub.publish(text)
        import json

        return CompileResponse(seq=seq, doc=json.loads(text), html=emit_html(doc) if emit else None)

    @app.get("/{asset:path}", include_in_schema=False)
    def static_asset(asset: str):
        # serve client build artifacts (main.js and friends); API routes
        # above always win
        base = app.state.static_dir.resolve()
        target = (base / asset).resolve()
        if not str(target).startswith(str(base)) or not target.is_file():
            raise HTTPException(404, "not found")
        media = "text/javascript" if target.suffix == ".js" else "text/html"
        return Response(content=target.read_bytes(), media_type=media)

    @app.websocket("/ws")
    async def websocket_endpoint(websocket: WebSocket):
        await websocket.accept()
        client_id, queue = hub.register()
        last_sent = -1

        async def feed():
            nonlocal last_sent
            while True:
                message: UpdateMessage = await queue.get()
                if message.seq <= last_sent:
                    continue  # replay raced a publish; never regress
                last_sent = message.seq
                await websocket.send_text(message.model_dump_json())

        try:
            latest_doc = hub.latest
            if latest_doc is not None:
                first = UpdateMessage(kind="dsl_update", seq=latest_doc[0], payload=latest_doc[1])
                last_sent = latest_doc[0]
            else:
                first = UpdateMessage(kind="hello", seq=0)
                last_sent = 0
            await websocket.send_text(first.model_dump_json())

            feeder = asyncio.create_task(feed())
            try:
                while True:
                    # subscribers have nothing to say; malformed chatter
                    # gets an out-of-band error frame
                    text = await websocket.receive_text()
                    if text.strip():
                        await websocket.send_text(
                            UpdateMessage(kind="error", seq=0, payload="read-only stream").model_dump_json()
                        )
            finally:
                feeder.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    await feeder
        except WebSocketDisconnect:
            pass
        finally:
            hub.unregister(client_id)

    return app
