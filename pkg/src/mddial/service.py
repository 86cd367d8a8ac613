"""HTTP JSON protocol over DialogueService.

POST /session                      -> {session_id, task_text, greeting}
POST /session/{id}/turn {text}     -> {system_text, acts, finished}
POST /session/{id}/questionnaire   -> {stored: true}
GET  /session/{id}/log             -> full per-turn log
"""

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from mddial.session import DialogueService, SessionError


class TurnRequest(BaseModel):
    text: str = Field(min_length=1)


class QuestionnaireRequest(BaseModel):
    q1_subj_succ: bool
    q2_voice_int: int
    q3_understand: int
    q4_as_expect: int
    q5_would_use: int


def create_app(service: DialogueService):
    app = FastAPI(title="dialogue service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.service = service

    def _conflict(exc):
        msg = str(exc)
        status = 404 if "unknown session" in msg else 409
        raise HTTPException(status_code=status, detail=msg)

    @app.post("/session")
    def open_session():
        session_id, task_text, greeting = service.open_session()
        return {"session_id": session_id, "task_text": task_text, "greeting": greeting}

    @app.post("/session/{session_id}/turn")
    def turn(session_id: str, req: TurnRequest):
        try:
            system_text, acts, finished = service.turn(session_id, req.text)
        except SessionError as exc:
            _conflict(exc)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"system_text": system_text, "acts": acts, "finished": finished}

    @app.post("/session/{session_id}/questionnaire")
    def questionnaire(session_id: str, req: QuestionnaireRequest):
        try:
            service.submit_questionnaire(session_id, req.model_dump())
        except SessionError as exc:
            _conflict(exc)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"stored": True}

    @app.get("/session/{session_id}/log")
    def log(session_id: str):
        try:
            return service.log_of(session_id)
        except SessionError as exc:
            _conflict(exc)

    return app
