from fastapi import FastAPI

from balanced import __version__
from balanced.api.routes import router
from balanced.config import Caps, load_caps
from balanced.errors import add_exception_handlers


def create_app(caps: Caps | None = None) -> FastAPI:
    """Build the app; `caps` defaults to the `BALANCED_*` environment and bounds every request."""
    app = FastAPI(
        title="Balanced Labelings API",
        version=__version__,
        description="Check, parametrize and count balanced Abelian-group labelings of directed multigraphs.",
    )
    app.state.caps = caps if caps is not None else load_caps()
    app.include_router(router)
    add_exception_handlers(app)
    return app


app = create_app()
