"""FastAPI service exposing the library over HTTP.

Synchronous endpoints wrap the cheap operations (exact energies, pool
inspection, aggregation); training runs as a background job with a
pollable status and a CSV log endpoint.
"""
from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from . import aggregate as agg
from .errors import NumericError
from .losses import LossConfig
from .model import ModelConfig
from .pool import build_pool, pool_for_hamiltonian
from .replay import HybridConfig
from .schemas import (
    AggregatePointModel,
    AggregateRequest,
    AggregateResponse,
    BlockMinimumModel,
    ExactRequest,
    ExactResponse,
    JobStatusResponse,
    PoolRequest,
    PoolResponse,
    RunSummaryModel,
    TokenModel,
    TrainRequest,
    TrainSubmitResponse,
)
from .simulator import exact_ground_energy, expectation, hartree_fock_state
from .trainer import RunLog, ScheduleConfig, TrainConfig, Trainer, run_csv_text


@dataclass
class _Job:
    request: TrainRequest
    status: str = "queued"
    steps_done: int = 0
    log: RunLog | None = None
    csv_text: str = ""
    error: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _train_config(req: TrainRequest) -> TrainConfig:
    hybrid = HybridConfig()
    if req.hybrid is not None:
        hybrid = HybridConfig(
            capacity=req.hybrid.capacity,
            reuse=req.hybrid.reuse,
            start=req.hybrid.start,
            enabled=req.hybrid.enabled,
        )
    return TrainConfig(
        hamiltonian_path="<inline>",
        model=ModelConfig(
            vocab_size=0,
            max_len=req.sequence_length,
            embed_dim=req.embed_dim,
            ff_dim=req.ff_dim,
            n_heads=req.n_heads,
            n_layers=req.n_layers,
            dropout=req.dropout,
        ),
        loss=LossConfig(variant=req.loss, beta=req.beta, alpha=req.alpha),
        hybrid=hybrid,
        schedule=ScheduleConfig(
            t_initial=req.temperature_initial,
            t_final=req.temperature_final,
            n_steps=req.steps,
        ),
        samples_per_step=req.samples_per_step,
        learning_rate=req.learning_rate,
        weight_decay=req.weight_decay,
        seed=req.seed,
        grad_clip=req.grad_clip,
    )


def create_app(max_workers: int = 1) -> FastAPI:
    app = FastAPI(title="gqe", description="generative circuit-model training service")
    jobs: dict[str, _Job] = {}
    executor = ThreadPoolExecutor(max_workers=max_workers)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/exact", response_model=ExactResponse)
    def exact(request: ExactRequest) -> ExactResponse:
        try:
            h = request.hamiltonian.to_hamiltonian()
            ground = exact_ground_energy(h)
            hf = expectation(hartree_fock_state(h.n_qubits, h.hf_occupation), h)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return ExactResponse(
            name=h.name,
            n_qubits=h.n_qubits,
            ground_energy=ground,
            hf_energy=hf,
            ground_energy_hint=h.ground_energy_hint,
        )

    @app.post("/pool", response_model=PoolResponse)
    def pool_info(request: PoolRequest) -> PoolResponse:
        try:
            if request.hamiltonian is not None:
                pool = pool_for_hamiltonian(
                    request.hamiltonian.to_hamiltonian(), request.angles
                )
            elif request.n_electrons is not None and request.n_qubits is not None:
                pool = build_pool(request.n_electrons, request.n_qubits, request.angles)
            else:
                raise ValueError(
                    "provide either a hamiltonian or (n_electrons, n_qubits)"
                )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        tokens = None
        if request.list_tokens:
            tokens = [
                TokenModel(
                    token=i, kind=g.kind.value, wires=list(g.wires), angle=g.angle
                )
                for i, g in enumerate(pool.gates)
            ]
        return PoolResponse(
            size=pool.size,
            n_singles=len(pool.singles),
            n_doubles=len(pool.doubles),
            angle_set=list(pool.angle_set),
            tokens=tokens,
        )

    def _run_job(job_id: str) -> None:
        job = jobs[job_id]
        with job.lock:
            job.status = "running"
        try:
            cfg = _train_config(job.request)
            hamiltonian = job.request.hamiltonian.to_hamiltonian()
            trainer = Trainer(cfg, hamiltonian=hamiltonian)

            def on_step(record) -> None:
                with job.lock:
                    job.steps_done = record.step + 1

            log = trainer.run(on_step=on_step)
            with job.lock:
                job.log = log
                job.csv_text = run_csv_text(log.records)
                job.status = "done"
        except (ValueError, NumericError) as exc:
            with job.lock:
                job.error = str(exc)
                job.status = "failed"

    @app.post("/train", response_model=TrainSubmitResponse)
    def submit_train(request: TrainRequest) -> TrainSubmitResponse:
        try:
            _train_config(request)  # fail fast on bad settings
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        job_id = uuid.uuid4().hex[:12]
        jobs[job_id] = _Job(request=request)
        executor.submit(_run_job, job_id)
        return TrainSubmitResponse(job_id=job_id)

    def _get_job(job_id: str) -> _Job:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"no job {job_id!r}")
        return job

    @app.get("/train/{job_id}", response_model=JobStatusResponse)
    def job_status(job_id: str) -> JobStatusResponse:
        job = _get_job(job_id)
        with job.lock:
            summary = None
            if job.log is not None:
                summary = RunSummaryModel(
                    best_energy=job.log.best_energy,
                    best_sequence=list(job.log.best_sequence),
                    seed=job.log.seed,
                    config_digest=job.log.config_digest,
                    wall_time_s=job.log.wall_time_s,
                )
            return JobStatusResponse(
                job_id=job_id,
                status=job.status,
                steps_done=job.steps_done,
                n_steps=job.request.steps,
                summary=summary,
                error=job.error,
            )

    @app.get("/train/{job_id}/log.csv", response_class=PlainTextResponse)
    def job_log(job_id: str) -> str:
        job = _get_job(job_id)
        with job.lock:
            if job.status != "done":
                raise HTTPException(
                    status_code=409, detail=f"job is {job.status}, not done"
                )
            return job.csv_text

    @app.post("/aggregate", response_model=AggregateResponse)
    def aggregate_runs(request: AggregateRequest) -> AggregateResponse:
        try:
            curves = [
                agg.parse_run_csv(text.splitlines(), f"run{i}")
                for i, text in enumerate(request.csv_texts)
            ]
            points = agg.aggregate_curves(curves)
            blocks = None
            if request.block:
                blocks = [
                    BlockMinimumModel(
                        run=i, block_start=lo, block_end=hi, block_min=value
                    )
                    for i, curve in enumerate(curves)
                    for lo, hi, value in agg.block_minima(curve, request.block)
                ]
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return AggregateResponse(
            points=[
                AggregatePointModel(step=p.step, mean=p.mean, min=p.min, max=p.max)
                for p in points
            ],
            blocks=blocks,
        )

    return app


app = create_app()
