import os
import json
import logging
from typing import List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, ValidationError

from core.errors import ParseError, UnknownAIota
from core.expression import compile_expression
from core.extreal import parse_ext
from core.regime import Regime, RegimeClassification
from core.sequence import (
    AffineLog,
    ExplicitOnly,
    Expression,
    FactorialPower,
    Geometric,
    SequenceSpec,
    TailRule,
)

logger = logging.getLogger(__name__)

Number = Union[int, float, str]


class TailModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["explicit_only", "factorial_power", "geometric", "affine_log", "expression"] = "explicit_only"
    s: Optional[Number] = None
    c: Optional[Number] = None
    d: Optional[Number] = None
    expression: Optional[str] = None
    scale: Literal["log", "weight"] = "log"


class DeclaredRegimeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    regime: Literal["standard", "case1", "case2", "indeterminate"]
    a_iota: Optional[Number] = None


class SequenceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["weight", "log"]
    prefix: List[Number] = []
    tail: TailModel = TailModel()
    declared_regime: Optional[Union[DeclaredRegimeModel, str]] = None
    name: str = ""


def load_document(file_path: str):
    """Reads a JSON or YAML document, chosen by file extension."""
    file_extension = os.path.splitext(file_path)[1].lower()
    try:
        with open(file_path, "r") as f:
            if file_extension == ".json":
                return json.load(f)
            elif file_extension in [".yml", ".yaml"]:
                return yaml.safe_load(f)
            else:
                raise ParseError("Unsupported file format", field=file_path)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON in {file_path}: {e.msg}", line=e.lineno) from e
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark is not None else None
        raise ParseError(f"invalid YAML in {file_path}: {e.problem}", line=line) from e
    except OSError as e:
        raise ParseError(f"cannot read {file_path}: {e.strerror}") from e


def _number(raw, field: str):
    try:
        return parse_ext(raw)
    except ValueError as e:
        raise ParseError(str(e), field=field) from e


def _tail(model: TailModel) -> TailRule:
    try:
        if model.type == "explicit_only":
            return ExplicitOnly()
        if model.type == "factorial_power":
            if model.s is None:
                raise ParseError("factorial_power needs s", field="tail.s")
            c = _number(model.c, "tail.c") if model.c is not None else 1
            return FactorialPower(_number(model.s, "tail.s"), c)
        if model.type == "geometric":
            if model.d is None:
                raise ParseError("geometric needs d", field="tail.d")
            return Geometric(_number(model.d, "tail.d"))
        if model.type == "affine_log":
            if model.c is None:
                raise ParseError("affine_log needs c", field="tail.c")
            return AffineLog(_number(model.c, "tail.c"))
        if not model.expression:
            raise ParseError("expression tail needs an expression", field="tail.expression")
        return Expression(compile_expression(model.expression), scale=model.scale, source=model.expression)
    except (TypeError, ValueError) as e:
        raise ParseError(str(e), field="tail") from e


def _declared(raw) -> Optional[RegimeClassification]:
    if raw is None:
        return None
    if isinstance(raw, str):
        try:
            raw = DeclaredRegimeModel(regime=raw.lower())
        except ValidationError as e:
            raise ParseError(f"unknown regime {raw!r}", field="declared_regime") from e
    a_iota = _number(raw.a_iota, "declared_regime.a_iota") if raw.a_iota is not None else None
    try:
        return RegimeClassification(Regime(raw.regime), a_iota=a_iota)
    except (ValueError, UnknownAIota) as e:
        raise ParseError(str(e), field="declared_regime") from e


def _location(error: dict) -> str:
    return ".".join(str(part) for part in error["loc"])


def sequence_from_document(document, name: str = "") -> SequenceSpec:
    """
    Validates a parsed sequence document and builds the SequenceSpec.

    Args:
    - document: the decoded JSON/YAML mapping.
    - name: fallback name, usually the file stem.

    Returns:
    The SequenceSpec; ParseError naming the offending field otherwise.
    """
    try:
        model = SequenceFile.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        raise ParseError(first["msg"], field=_location(first)) from e
    prefix = [_number(x, f"prefix.{i}") for i, x in enumerate(model.prefix)]
    if not prefix and model.tail.type == "explicit_only":
        raise ParseError("an explicit sequence needs a non-empty prefix", field="prefix")
    try:
        return SequenceSpec(
            prefix=tuple(prefix),
            tail=_tail(model.tail),
            kind=model.kind,
            declared_regime=_declared(model.declared_regime),
            name=model.name or name,
        )
    except ValueError as e:
        raise ParseError(str(e), field="prefix") from e


def load_sequence(file_path: str) -> SequenceSpec:
    name = os.path.basename(file_path).split(".")[0]
    logger.debug(f"loading sequence {name} from {file_path}")
    return sequence_from_document(load_document(file_path), name)
