"""Thin-client HTTP service: uploads, evaluation, background optimization jobs,
profile export, and monitoring.

Artifacts live in an in-memory registry keyed by content digest; nothing is
persisted (the profile file is the persistence).  Evaluate/export/monitor
responses are pure functions of stored artifacts, so repeated calls return
byte-identical bodies.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .costs import CostSchedule, CostScheduleError, schedule_from_payload
from .dataset import Dataset, DatasetError, TaskKind, parse_dataset, summarize
from .evaluation import evaluate_dataset, evaluation_payload
from .monitor import MonitorError, monitor_compare, report_payload
from .optimizer import (
    OptimizationCancelled,
    OptimizationResult,
    OptimizerSettings,
    ProgressUpdate,
    optimize,
)
from .payloads import digest_of, dumps, result_payload, settings_payload, summary_payload
from .profiles import (
    ProfileError,
    ProfileProvenance,
    document_from_payload,
    export_profile,
    make_baseline,
    utc_now_rfc3339,
)
from .thresholding import TaskMismatchError, ThresholdProfile
from .version import ENGINE_VERSION

DEFAULT_MAX_UPLOAD_BYTES = 64 * 1024 * 1024
DEFAULT_WORKER_COUNT = 2

JOB_QUEUED = "queued"
JOB_RUNNING = "running"
JOB_DONE = "done"
JOB_FAILED = "failed"
JOB_CANCELLED = "cancelled"

_SETTINGS_FIELDS = (
    "population_size",
    "generations",
    "crossover_probability",
    "crossover_distribution_index",
    "mutation_probability_per_gene",
    "mutation_distribution_index",
    "rng_seed",
)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: Any = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


@dataclass(frozen=True)
class JobProgress:
    generation: int
    generations_total: int
    best_objectives: tuple[float, float, float] | None


@dataclass(frozen=True)
class JobState:
    job_id: str
    status: str
    progress: JobProgress
    result: OptimizationResult | None
    error: str | None


class _Job:
    def __init__(self, job_id: str, key: tuple[str, str, str], dataset: Dataset,
                 settings: OptimizerSettings, schedule: CostSchedule | None):
        self.job_id = job_id
        self.key = key
        self.dataset = dataset
        self.settings = settings
        self.schedule = schedule
        self.cancel_event = threading.Event()
        self.future = None
        self.completed_at: str | None = None  # pinned once, keeps exports byte-stable
        # Snapshots are immutable and swapped atomically; readers never block.
        self._state = JobState(
            job_id=job_id,
            status=JOB_QUEUED,
            progress=JobProgress(0, settings.generations, None),
            result=None,
            error=None,
        )

    @property
    def state(self) -> JobState:
        return self._state

    def set_state(self, **changes) -> None:
        self._state = replace(self._state, **changes)


class ServiceRegistry:
    """Thread-safe store for uploaded datasets and optimization jobs."""

    def __init__(self, worker_count: int = DEFAULT_WORKER_COUNT):
        self._datasets: dict[str, tuple[Dataset, str]] = {}
        self._jobs: dict[str, _Job] = {}
        self._lock = threading.Lock()
        self._executor = ThreadPoolExecutor(max_workers=worker_count)

    def add_dataset(self, dataset: Dataset) -> str:
        with self._lock:
            if dataset.content_digest not in self._datasets:
                self._datasets[dataset.content_digest] = (dataset, utc_now_rfc3339())
        return dataset.content_digest

    def get_dataset(self, dataset_id: str) -> tuple[Dataset, str]:
        with self._lock:
            entry = self._datasets.get(dataset_id)
        if entry is None:
            raise ApiError(404, "not_found", f"unknown dataset {dataset_id!r}")
        return entry

    def get_job(self, job_id: str) -> _Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise ApiError(404, "not_found", f"unknown job {job_id!r}")
        return job

    def submit_job(self, dataset: Dataset, settings: OptimizerSettings,
                   schedule: CostSchedule | None) -> tuple[_Job, bool]:
        key = (
            dataset.content_digest,
            digest_of(dict(settings_payload(settings), rng_seed=settings.rng_seed)),
            schedule.digest() if schedule is not None else "none",
        )
        with self._lock:
            for job in self._jobs.values():
                if job.key == key and job.state.status in (JOB_QUEUED, JOB_RUNNING):
                    return job, False
            job = _Job(uuid.uuid4().hex, key, dataset, settings, schedule)
            self._jobs[job.job_id] = job
            job.future = self._executor.submit(self._run_job, job)
        return job, True

    def cancel_job(self, job_id: str) -> _Job:
        job = self.get_job(job_id)
        job.cancel_event.set()
        if job.future is not None and job.future.cancel():
            job.set_state(status=JOB_CANCELLED)
        return job

    def shutdown(self) -> None:
        with self._lock:
            jobs = list(self._jobs.values())
        for job in jobs:
            job.cancel_event.set()
        self._executor.shutdown(wait=True, cancel_futures=True)

    def _run_job(self, job: _Job) -> None:
        if job.cancel_event.is_set():
            job.set_state(status=JOB_CANCELLED)
            return
        job.set_state(status=JOB_RUNNING)

        def on_progress(update: ProgressUpdate) -> None:
            job.set_state(progress=JobProgress(
                generation=update.generation,
                generations_total=update.generations_total,
                best_objectives=update.best_objectives,
            ))

        try:
            result = optimize(
                job.dataset,
                job.settings,
                job.schedule,
                progress=on_progress,
                should_stop=job.cancel_event.is_set,
            )
        except OptimizationCancelled:
            job.set_state(status=JOB_CANCELLED)
        except Exception as exc:  # surfaced through the job state, not the transport
            job.set_state(status=JOB_FAILED, error=str(exc))
        else:
            job.completed_at = utc_now_rfc3339()
            job.set_state(status=JOB_DONE, result=result)


def _json_response(payload: Any, status: int = 200) -> Response:
    return Response(content=dumps(payload), status_code=status, media_type="application/json")


def _error_response(status: int, code: str, message: str, detail: Any = None) -> Response:
    return _json_response({"code": code, "message": message, "detail": detail}, status=status)


async def _json_body(request: Request) -> dict[str, Any]:
    try:
        payload = await request.json()
    except Exception:
        raise ApiError(400, "invalid_json", "request body is not valid JSON") from None
    if not isinstance(payload, dict):
        raise ApiError(400, "invalid_json", "request body must be a JSON object")
    return payload


def _settings_from_body(raw: Any) -> OptimizerSettings:
    if raw is None:
        return OptimizerSettings()
    if not isinstance(raw, Mapping):
        raise ApiError(400, "invalid_settings", "settings must be an object")
    unknown = set(raw) - set(_SETTINGS_FIELDS)
    if unknown:
        raise ApiError(400, "invalid_settings", f"unknown settings fields: {sorted(unknown)}")
    defaults = OptimizerSettings()
    try:
        settings = OptimizerSettings(
            population_size=int(raw.get("population_size", defaults.population_size)),
            generations=int(raw.get("generations", defaults.generations)),
            crossover_probability=float(raw.get("crossover_probability", defaults.crossover_probability)),
            crossover_distribution_index=float(
                raw.get("crossover_distribution_index", defaults.crossover_distribution_index)
            ),
            mutation_probability_per_gene=(
                None if raw.get("mutation_probability_per_gene") is None
                else float(raw["mutation_probability_per_gene"])
            ),
            mutation_distribution_index=float(
                raw.get("mutation_distribution_index", defaults.mutation_distribution_index)
            ),
            rng_seed=int(raw.get("rng_seed", defaults.rng_seed)),
        )
        settings.validate()
    except (TypeError, ValueError) as exc:
        raise ApiError(422, "invalid_settings", str(exc)) from None
    return settings


def _schedule_from_body(raw: Any) -> CostSchedule | None:
    if raw is None:
        return None
    try:
        return schedule_from_payload(raw)
    except CostScheduleError as exc:
        raise ApiError(422, "invalid_costs", str(exc)) from None


def _profile_from_body(dataset: Dataset, body: Mapping[str, Any]) -> ThresholdProfile:
    task_raw = body.get("task")
    if task_raw is not None and task_raw != dataset.task.value:
        raise ApiError(422, "task_mismatch", f"body task {task_raw!r} does not match dataset task {dataset.task.value!r}")
    thresholds_raw = body.get("thresholds") or {}
    if not isinstance(thresholds_raw, Mapping):
        raise ApiError(422, "invalid_thresholds", "thresholds must be an object keyed by label")
    try:
        return ThresholdProfile(
            thresholds={str(label): float(value) for label, value in thresholds_raw.items()},
            default_threshold=float(body.get("default_threshold", 0.5)),
            task=dataset.task,
            positive_label=dataset.positive_label,
        )
    except (TypeError, ValueError) as exc:
        raise ApiError(422, "invalid_thresholds", str(exc)) from None


def _job_payload(job: _Job) -> dict[str, Any]:
    state = job.state
    progress = state.progress
    return {
        "job_id": state.job_id,
        "status": state.status,
        "progress": {
            "generation": progress.generation,
            "generations_total": progress.generations_total,
            "best_objectives": None if progress.best_objectives is None else list(progress.best_objectives),
        },
        "result": None if state.result is None else result_payload(state.result, job.dataset.vocabulary),
        "error": state.error,
    }


def create_app(
    *,
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES,
    worker_count: int = DEFAULT_WORKER_COUNT,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    registry = ServiceRegistry(worker_count=worker_count)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        registry.shutdown()

    app = FastAPI(title="threshtune", version=ENGINE_VERSION, lifespan=lifespan,
                  docs_url=None, redoc_url=None, openapi_url=None)
    app.state.registry = registry

    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"http://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(_: Request, exc: ApiError) -> Response:
        return _error_response(exc.status, exc.code, exc.message, exc.detail)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_: Request, exc: RequestValidationError) -> Response:
        return _error_response(400, "invalid_request", "request validation failed", detail=str(exc))

    @app.exception_handler(Exception)
    async def handle_internal_error(_: Request, exc: Exception) -> Response:
        return _error_response(500, "internal_error", f"{type(exc).__name__}: {exc}")

    @app.get("/api/health")
    async def health() -> Response:
        return _json_response({"status": "ok", "engine_version": ENGINE_VERSION})

    @app.post("/api/datasets")
    async def upload_dataset(request: Request) -> Response:
        body = await request.body()
        if len(body) > max_upload_bytes:
            raise ApiError(413, "payload_too_large",
                           f"upload of {len(body)} bytes exceeds the {max_upload_bytes}-byte limit")
        params = request.query_params
        task = params.get("task")
        if task is None:
            raise ApiError(400, "missing_task", "query parameter 'task' is required")
        try:
            dataset = parse_dataset(body, task, params.get("positive_label"))
        except DatasetError as exc:
            raise ApiError(400, "parse_error", str(exc), detail={"line": exc.line}) from None
        registry.add_dataset(dataset)
        return _json_response(summary_payload(dataset, summarize(dataset)), status=201)

    @app.get("/api/datasets/{dataset_id}/summary")
    async def dataset_summary(dataset_id: str) -> Response:
        dataset, _ = registry.get_dataset(dataset_id)
        return _json_response(summary_payload(dataset, summarize(dataset)))

    @app.post("/api/datasets/{dataset_id}/evaluate")
    async def evaluate(dataset_id: str, request: Request) -> Response:
        dataset, _ = registry.get_dataset(dataset_id)
        body = await _json_body(request)
        profile = _profile_from_body(dataset, body)
        schedule = _schedule_from_body(body.get("costs"))
        outcome = evaluate_dataset(dataset, profile, schedule)
        return _json_response(evaluation_payload(outcome))

    @app.post("/api/datasets/{dataset_id}/optimize")
    async def submit_optimize(dataset_id: str, request: Request) -> Response:
        dataset, _ = registry.get_dataset(dataset_id)
        body = await _json_body(request)
        settings = _settings_from_body(body.get("settings"))
        schedule = _schedule_from_body(body.get("costs"))
        job, created = registry.submit_job(dataset, settings, schedule)
        if not created:
            return _error_response(409, "duplicate_job",
                                   "an identical job is already active; poll the existing job",
                                   detail={"job_id": job.job_id})
        return _json_response({"job_id": job.job_id}, status=202)

    @app.get("/api/jobs/{job_id}")
    async def job_state(job_id: str) -> Response:
        return _json_response(_job_payload(registry.get_job(job_id)))

    @app.delete("/api/jobs/{job_id}")
    async def cancel_job(job_id: str) -> Response:
        job = registry.cancel_job(job_id)
        return _json_response(_job_payload(job))

    @app.post("/api/export")
    async def export(request: Request) -> Response:
        body = await _json_body(request)
        dataset_id = body.get("dataset_id")
        if not dataset_id:
            raise ApiError(400, "missing_dataset_id", "body field 'dataset_id' is required")
        dataset, uploaded_at = registry.get_dataset(str(dataset_id))

        job_id = body.get("job_id")
        if job_id is not None:
            job = registry.get_job(str(job_id))
            state = job.state
            if state.status != JOB_DONE or state.result is None:
                raise ApiError(422, "job_not_done", f"job {job_id} is {state.status}, not done")
            if job.dataset.content_digest != dataset.content_digest:
                raise ApiError(422, "dataset_mismatch", "job was optimized against a different dataset")
            result = state.result
            index = body.get("solution_index", result.recommended_index)
            if not isinstance(index, int) or not (0 <= index < len(result.front)):
                raise ApiError(422, "invalid_solution_index",
                               f"solution_index must be in [0, {len(result.front) - 1}]")
            solution = result.front[index]
            profile = ThresholdProfile(
                thresholds=dict(zip(dataset.vocabulary, solution.thresholds)),
                default_threshold=0.5,
                task=dataset.task,
                positive_label=dataset.positive_label,
            )
            schedule = _schedule_from_body(body.get("costs")) or job.schedule
            provenance = ProfileProvenance(
                dataset_digest=dataset.content_digest,
                settings=job.settings,
                engine_version=ENGINE_VERSION,
                created_at=job.completed_at or uploaded_at,
            )
        else:
            profile = _profile_from_body(dataset, body)
            schedule = _schedule_from_body(body.get("costs"))
            provenance = ProfileProvenance(
                dataset_digest=dataset.content_digest,
                settings=None,
                engine_version=ENGINE_VERSION,
                created_at=uploaded_at,
            )

        baseline = make_baseline(dataset, profile, schedule)
        data = export_profile(profile, provenance=provenance, baseline=baseline, costs=schedule)
        filename = f"thresholds-{dataset.content_digest[:12]}.threshy.json"
        return Response(
            content=data,
            media_type="application/json",
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    @app.post("/api/monitor")
    async def monitor(request: Request) -> Response:
        body = await _json_body(request)
        dataset_id = body.get("dataset_id")
        if not dataset_id:
            raise ApiError(400, "missing_dataset_id", "body field 'dataset_id' is required")
        dataset, _ = registry.get_dataset(str(dataset_id))
        profile_raw = body.get("profile")
        if not isinstance(profile_raw, Mapping):
            raise ApiError(400, "missing_profile", "body field 'profile' must hold a profile document")
        try:
            document = document_from_payload(dict(profile_raw))
        except ProfileError as exc:
            raise ApiError(422, "invalid_profile", str(exc)) from None
        tolerance = body.get("tolerance", 0.05)
        cost_tolerance = body.get("cost_tolerance")
        try:
            report = monitor_compare(
                document,
                dataset,
                tolerance=float(tolerance),
                cost_tolerance=None if cost_tolerance is None else float(cost_tolerance),
            )
        except (MonitorError, TaskMismatchError) as exc:
            raise ApiError(422, "monitor_error", str(exc)) from None
        return _json_response(report_payload(report))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
