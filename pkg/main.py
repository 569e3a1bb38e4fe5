from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from msou.routes import decomposition, evaluation

app = FastAPI(
    title="MSO+U Tree Logic API",
    description="API for evaluating MSO+U formulas on finite trees, computing their types and decompositions",
    version="1.0.0"
)

# Enable CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(evaluation.router, tags=["evaluation"])
app.include_router(decomposition.router, tags=["decomposition"])


@app.get("/status")
def get_status():
    return "OK"
