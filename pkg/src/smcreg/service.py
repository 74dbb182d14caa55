"""HTTP service: streaming fit sessions plus one-shot simulate/batch calls.

A session wraps one streaming fit.  Observations posted before the warm-up
size is reached are buffered; once enough have arrived the batch warm-up
chain runs, the particle system is seeded, and every further observation is
ingested online.  Session state lives in process memory.
"""

from __future__ import annotations

from itertools import count

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .config import RunConfig, parse_config
from .engine import snapshot
from .errors import SmcregError
from .gibbs import ChainOutput
from .rng import RandomStream
from .runner import batch_chain, build_model, design_matrix, warm_seed
from .simulate import simulate

app = FastAPI(title="smcreg", version="0.1.0")


class SimulateRequest(BaseModel):
    scenario: str
    n: int = Field(gt=0)
    seed: int


class SessionRequest(BaseModel):
    config: dict
    seed: int | None = None


class ObservationsRequest(BaseModel):
    records: list[dict[str, float]]


class BatchRequest(BaseModel):
    config: dict
    records: list[dict[str, float]]
    seed: int | None = None
    n_burn: int | None = None
    n_kept: int | None = None


class _Session:
    def __init__(self, config: RunConfig):
        if config.seed is None:
            raise SmcregError("a session needs a seed (config key or request field)")
        self.config = config
        self.warm_records: list[dict] = []
        self.builder = None
        self.model = None
        self.system = None
        root = RandomStream(config.seed)
        self.warm_stream = root.substream(1)
        self.stream = root.substream(2)

    @property
    def phase(self) -> str:
        return "streaming" if self.system is not None else "warming"

    def add(self, record: dict):
        if self.system is None:
            self.warm_records.append(record)
            if len(self.warm_records) >= self.config.warmup.n_warm:
                self._seed()
            return
        row = self.builder.design_row(record)
        self.model.ingest(
            self.system,
            record[self.config.model.response],
            row,
            self.config.smc.tau_value,
            self.stream,
        )

    def _seed(self):
        self.builder, self.model = build_model(self.config, self.warm_records)
        y_warm, c_warm = design_matrix(self.builder, self.config, self.warm_records)
        self.system = warm_seed(
            self.model, y_warm, c_warm, self.config.smc.M,
            self.config.warmup.n_burn, self.warm_stream,
        )
        self.system.n_seen = len(self.warm_records)

    def state(self) -> dict:
        out = {"phase": self.phase, "n_warm_buffered": len(self.warm_records)}
        if self.system is not None:
            out["snapshot"] = snapshot(self.system)
        return out


_sessions: dict[int, _Session] = {}
_ids = count(1)


def _get_session(session_id: int) -> _Session:
    try:
        return _sessions[session_id]
    except KeyError:
        raise HTTPException(status_code=404, detail="no such session") from None


@app.post("/simulate")
def simulate_endpoint(req: SimulateRequest):
    try:
        records, truth = simulate(req.scenario, req.n, RandomStream(req.seed))
    except SmcregError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return {"records": records, "truth": truth}


@app.post("/sessions", status_code=201)
def create_session(req: SessionRequest):
    try:
        config = parse_config(req.config)
        if req.seed is not None:
            config = config.model_copy(update={"seed": req.seed})
        session = _Session(config)
    except SmcregError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    session_id = next(_ids)
    _sessions[session_id] = session
    return {"session_id": session_id, "phase": session.phase}


@app.post("/sessions/{session_id}/observations")
def post_observations(session_id: int, req: ObservationsRequest):
    session = _get_session(session_id)
    try:
        for record in req.records:
            session.add(dict(record))
    except SmcregError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return session.state()


@app.get("/sessions/{session_id}")
def get_session(session_id: int):
    return _get_session(session_id).state()


@app.delete("/sessions/{session_id}")
def delete_session(session_id: int):
    _get_session(session_id)
    del _sessions[session_id]
    return {"deleted": session_id}


@app.post("/batch")
def batch_endpoint(req: BatchRequest):
    try:
        config = parse_config(req.config)
        if req.seed is not None:
            config = config.model_copy(update={"seed": req.seed})
        if config.seed is None:
            raise SmcregError("a seed is required")
        from .design import DesignBuilder

        builder = DesignBuilder([p.to_spec() for p in config.model.predictors])
        builder.fit_ranges(req.records)
        y, c = design_matrix(builder, config, [dict(r) for r in req.records])
        chain: ChainOutput = batch_chain(
            config, builder, y, c, RandomStream(config.seed), req.n_burn, req.n_kept
        )
    except SmcregError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    draws = chain.draws
    summary = {
        name: {
            "mean": float(draws[:, j].mean()),
            "lo": float(np.percentile(draws[:, j], 2.5)),
            "hi": float(np.percentile(draws[:, j], 97.5)),
        }
        for j, name in enumerate(chain.names)
    }
    return {
        "n_kept": chain.n_kept,
        "names": list(chain.names),
        "summary": summary,
        "accept_rate": chain.accept_rate,
        "upsilon": chain.upsilon,
    }
