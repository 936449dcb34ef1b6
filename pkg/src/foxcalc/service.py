"""A small HTTP front end mirroring the CLI commands.

Run with ``uvicorn foxcalc.service:app``.  Each endpoint takes the same
fields as the matching CLI flags and returns the same JSON document; input
errors map to 400 and size bounds to 413.
"""
from __future__ import annotations

from argparse import Namespace

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import cli
from .corpus import CorpusError
from .groups import DEFAULT_MAX_ORDER, GroupError, OrderBoundExceeded


class GroupRequest(BaseModel):
    preset: str | None = None
    table: str | None = None
    within: str | None = None
    series: str = "gamma"
    subgroup: str | None = None
    verbose: bool = False
    max_order: int = Field(DEFAULT_MAX_ORDER, ge=1)
    max_degree: int = Field(cli.DEFAULT_MAX_DEGREE, ge=0)


class QuotientRequest(GroupRequest):
    kind: str = "fox"
    n: int = 2
    normal: str | None = None


class SubgroupRequest(GroupRequest):
    module: str
    normal: str | None = None


class VerifyRequest(BaseModel):
    suite: str | None = None
    corpus: str | None = None
    jobs: int = Field(1, ge=1)
    verbose: bool = False
    max_order: int = Field(DEFAULT_MAX_ORDER, ge=1)
    max_degree: int = Field(cli.DEFAULT_MAX_DEGREE, ge=0)


class OracleRequest(BaseModel):
    what: str
    params: list[str] = []
    max_order: int = Field(DEFAULT_MAX_ORDER, ge=1)
    max_degree: int = Field(cli.DEFAULT_MAX_DEGREE, ge=0)


class CommandResult(BaseModel):
    exit_code: int
    result: dict


app = FastAPI(title="foxcalc")


def _run(command, request: BaseModel) -> CommandResult:
    args = Namespace(report=None, **request.model_dump())
    try:
        out, code = command(args)
    except (OrderBoundExceeded, cli.BoundError) as exc:
        raise HTTPException(status_code=413, detail=str(exc)) from None
    except (cli.InputError, CorpusError, GroupError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return CommandResult(exit_code=code, result=out)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/describe", response_model=CommandResult)
def describe(req: GroupRequest):
    return _run(cli.cmd_describe, req)


@app.post("/quotient", response_model=CommandResult)
def quotient(req: QuotientRequest):
    return _run(cli.cmd_quotient, req)


@app.post("/subgroup", response_model=CommandResult)
def subgroup(req: SubgroupRequest):
    return _run(cli.cmd_subgroup, req)


@app.post("/verify", response_model=CommandResult)
def verify(req: VerifyRequest):
    return _run(cli.cmd_verify, req)


@app.post("/oracle", response_model=CommandResult)
def oracle(req: OracleRequest):
    return _run(cli.cmd_oracle, req)
