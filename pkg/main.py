from fastapi import FastAPI
from gp_states import __version__
from gp_states.api.states_router import router as states_router, settings
import logging

logging.basicConfig(level=settings.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")

app = FastAPI(
    title="GP States",
    description="Geometric progression states on Cuntz algebras: classification, evaluation and equivalence",
    version=__version__,
)

# Include routers
app.include_router(states_router)

@app.get("/api")
async def api_root():
    return {
        "message": "GP States API",
        "description": "Report commands over HTTP; bodies mirror the CLI arguments",
        "version": __version__,
        "endpoints": {
            "classify": "/states/classify",
            "upload_classify": "/states/upload/classify",
            "eval": "/states/eval",
            "equiv": "/states/equiv",
            "canon": "/states/canon",
            "lift": "/states/lift",
            "gauge": "/states/gauge",
            "gram": "/states/gram",
            "factorize": "/states/factorize",
        }
    }

@app.get("/health")
async def health():
    return {"status": "healthy", "service": "gp-states"}

if __name__ == "__main__":
    import uvicorn
    uvicorn.run("main:app", host="0.0.0.0", port=8000, reload=True)
