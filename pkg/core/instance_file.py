"""
Instance files
JSON documents describing a Courant algebroid in a frame, optionally with a
generalized metric, a divergence and connection coefficients.
"""

import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .connection import DivergenceOp, GenConnection
from .construct import InstanceSpec
from .courant import CourantAlgebroid, Section
from .errors import InputError, ParseError
from .metric import GenMetric
from .polyalg import Poly, format_rational, parse_rational, poly_parse, poly_print

logger = logging.getLogger(__name__)

_NAME_RE = re.compile(r'[A-Za-z][A-Za-z0-9_]*')


class InstanceFile(BaseModel):
    """
    Wire shape of an instance file

    Rationals are strings int('/'posint)?, polynomials follow the polynomial
    grammar over base_vars. Connection entries are ordered
    connection[i][j][k] = e_k-coefficient of D_{e_i} e_j.
    """
    model_config = ConfigDict(extra='forbid')

    name: str
    base_vars: List[str] = Field(default_factory=list)
    rank: int = Field(ge=1)
    pairing: List[List[str]]
    anchor: List[List[str]]
    structure: List[List[List[str]]]
    metric: Optional[List[List[str]]] = None
    divergence: Optional[List[str]] = None
    connection: Optional[List[List[List[str]]]] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @field_validator('base_vars')
    @classmethod
    def _check_vars(cls, value: List[str]) -> List[str]:
        for v in value:
            if not _NAME_RE.fullmatch(v):
                raise ValueError(f"invalid variable name {v!r}")
        if len(set(value)) != len(value):
            raise ValueError("base_vars contains duplicates")
        return value

    @model_validator(mode='after')
    def _check_shapes(self) -> 'InstanceFile':
        r, n = self.rank, len(self.base_vars)

        def square(rows, what):
            if len(rows) != r or any(len(row) != r for row in rows):
                raise ValueError(f"{what} must be {r}x{r}")

        square(self.pairing, 'pairing')
        if len(self.anchor) != r or any(len(row) != n for row in self.anchor):
            raise ValueError(f"anchor must be {r}x{n}")
        square(self.structure, 'structure')
        if any(len(entry) != r for row in self.structure for entry in row):
            raise ValueError(f"structure entries must have {r} coefficients")
        if self.metric is not None:
            square(self.metric, 'metric')
        if self.divergence is not None and len(self.divergence) != r:
            raise ValueError(f"divergence must have {r} values")
        if self.connection is not None:
            square(self.connection, 'connection')
            if any(len(entry) != r for row in self.connection for entry in row):
                raise ValueError(f"connection entries must have {r} coefficients")
        return self

    # Conversion

    def _rational(self, text: str, where: str):
        try:
            return parse_rational(text)
        except ParseError as e:
            raise ParseError(f"{where}: invalid rational literal {text!r}", e.line, e.column, text)

    def _poly(self, text: str, where: str) -> Poly:
        try:
            return poly_parse(text, self.base_vars)
        except ParseError as e:
            raise ParseError(f"{where}: {e.message}", e.line, e.column, text)

    def to_spec(self) -> InstanceSpec:
        """
        Parse every literal and build the instance

        Raises:
            ParseError: a literal does not follow the grammar (path in message)
            InputError: the pairing is not symmetric and invertible, or the
                connection is not compatible with the pairing
        """
        r = self.rank
        pairing = [[self._rational(x, f"pairing[{i}][{j}]") for j, x in enumerate(row)]
                   for i, row in enumerate(self.pairing)]
        anchor = [[self._poly(x, f"anchor[{i}][{mu}]") for mu, x in enumerate(row)]
                  for i, row in enumerate(self.anchor)]
        structure = [[[self._poly(x, f"structure[{i}][{j}][{k}]") for k, x in enumerate(entry)]
                      for j, entry in enumerate(row)] for i, row in enumerate(self.structure)]
        A = CourantAlgebroid.build(self.base_vars, pairing, anchor, structure,
                                   name=self.name, metadata=self.metadata)

        metric = None
        if self.metric is not None:
            metric = GenMetric.from_rows(
                [[self._rational(x, f"metric[{i}][{j}]") for j, x in enumerate(row)]
                 for i, row in enumerate(self.metric)])
        divergence = None
        if self.divergence is not None:
            divergence = DivergenceOp.from_values(
                A, [self._poly(x, f"divergence[{i}]") for i, x in enumerate(self.divergence)])
        connection = None
        if self.connection is not None:
            Gamma = [[Section(tuple(self._poly(x, f"connection[{i}][{j}][{k}]")
                                    for k, x in enumerate(entry)))
                      for j, entry in enumerate(row)] for i, row in enumerate(self.connection)]
            connection = GenConnection.create(A, Gamma)
        logger.debug(f"Parsed instance {self.name} (rank {r}, {len(self.base_vars)} variables)")
        return InstanceSpec(self.name, A, metric, divergence, connection, metadata=dict(self.metadata))

    @classmethod
    def from_spec(cls, spec: InstanceSpec) -> 'InstanceFile':
        """Canonical file form of an instance"""
        A = spec.algebroid
        data = {
            'name': spec.name,
            'base_vars': list(A.base_vars),
            'rank': A.rank,
            'pairing': [[format_rational(x) for x in row] for row in A.pairing],
            'anchor': [[poly_print(c) for c in row.components] for row in A.anchor],
            'structure': [[[poly_print(c) for c in s.coeffs] for s in row] for row in A.structure],
            'metadata': dict(spec.metadata or A.metadata),
        }
        if spec.metric is not None:
            data['metric'] = [[format_rational(x) for x in row] for row in spec.metric.G]
        if spec.divergence is not None:
            data['divergence'] = [poly_print(v) for v in spec.divergence.frame_values]
        if spec.connection is not None:
            data['connection'] = [[[poly_print(c) for c in s.coeffs] for s in row]
                                  for row in spec.connection.Gamma]
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(exclude_none=True), indent=2) + '\n'


def read_instance_file(path: Union[str, Path]) -> InstanceFile:
    """
    Read and shape-check an instance file

    Raises:
        OSError: unreadable file
        json.JSONDecodeError: not JSON
        pydantic.ValidationError: wrong members or shapes
    """
    with open(path, 'r') as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise InputError(f"{path}: instance file must hold a JSON object")
    return InstanceFile.model_validate(data)


def load_instance(path: Union[str, Path]) -> InstanceSpec:
    """Read an instance file and build the instance (not validated against the axioms)"""
    spec = read_instance_file(path).to_spec()
    logger.info(f"Loaded instance {spec.name} from {path}")
    return spec


def export_instance(spec: InstanceSpec, path: Optional[Union[str, Path]] = None) -> str:
    """Canonical JSON text of an instance, written to path when given"""
    text = InstanceFile.from_spec(spec).to_json()
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w') as f:
            f.write(text)
        logger.info(f"Exported {spec.name} to {path}")
    return text
