"""HTTP surface: recommendation, reward, and report endpoints.

Bodies use the wire shape of the rank protocol (camelCase keys:
``contextFeatures``, ``actions``, ``eventId``); entity records keep
snake_case. Validation failures map to 400, domain errors map to the
documented status codes, and duplicate rewards acknowledge with 204
plus a ``Duplicate: true`` header. Report endpoints return the same
canonical JSON bytes the CLI writes.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from bidimatch import __version__
from bidimatch.bandit import RewardStatus
from bidimatch.errors import (
    BidimatchError,
    InsufficientEvents,
    NoEligibleActions,
    OutOfRange,
    UnknownEvent,
    UnknownJob,
    UnknownModel,
    UnknownTraveler,
    WindowExpired,
)
from bidimatch.reports import canonical_json, eval_report_payload, feature_report_payload
from bidimatch.service.engine import RecommendationService, resolve_model_name

logger = logging.getLogger(__name__)

INSUFFICIENT_EVENTS_PAYLOAD = {"rows": [], "winner": "", "applied": False, "status": "InsufficientEvents"}


class RewardBody(BaseModel):
    eventId: str
    value: float


def create_app(service: RecommendationService) -> FastAPI:
    app = FastAPI(title="bidimatch", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed request body"})

    @app.exception_handler(BidimatchError)
    async def domain_error(request: Request, exc: BidimatchError):
        status = 500
        if isinstance(exc, (UnknownJob, UnknownTraveler, UnknownEvent, UnknownModel)):
            status = 404
        elif isinstance(exc, OutOfRange):
            status = 400
        elif isinstance(exc, WindowExpired):
            status = 410
        elif isinstance(exc, NoEligibleActions):
            status = 422
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.post("/recommendations/travelers")
    async def recommend_travelers(body: dict, page: int = Query(default=0, ge=0)):
        result = service.recommend_travelers(body, page=page)
        service.log_request(
            {"path": "/recommendations/travelers", "page": page, "event_ids": sorted(set(result.event_ids))}
        )
        return result.to_wire()

    @app.post("/recommendations/jobs")
    async def recommend_jobs(body: dict, page: int = Query(default=0, ge=0)):
        result = service.recommend_jobs(body, page=page)
        service.log_request(
            {"path": "/recommendations/jobs", "page": page, "event_ids": sorted(set(result.event_ids))}
        )
        return result.to_wire()

    def _reward(model_key: str, body: RewardBody) -> Response:
        model_name = resolve_model_name(model_key)
        ack = service.reward(model_name, body.eventId, body.value)
        service.log_request(
            {"path": f"/rewards/{model_key}", "event_ids": [body.eventId], "status": ack.status.value}
        )
        headers = {"Duplicate": "true"} if ack.status is RewardStatus.DUPLICATE else {}
        return Response(status_code=204, headers=headers)

    @app.post("/rewards/traveler-model", status_code=204)
    async def reward_traveler_model(body: RewardBody):
        return _reward("traveler-model", body)

    @app.post("/rewards/job-model", status_code=204)
    async def reward_job_model(body: RewardBody):
        return _reward("job-model", body)

    @app.get("/reports/feature-effectiveness")
    async def report_features(model: str):
        model_name = resolve_model_name(model)
        payload = feature_report_payload(service.feature_report(model_name))
        return Response(content=canonical_json(payload), media_type="application/json")

    @app.get("/reports/offline-eval")
    async def report_offline_eval(model: str):
        model_name = resolve_model_name(model)
        try:
            payload = eval_report_payload(service.eval_report(model_name))
        except InsufficientEvents:
            payload = dict(INSUFFICIENT_EVENTS_PAYLOAD)
        return Response(content=canonical_json(payload), media_type="application/json")

    @app.get("/health")
    async def health():
        return {"status": "ok", "version": __version__}

    return app
