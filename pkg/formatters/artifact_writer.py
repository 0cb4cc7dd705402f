"""
Artifact Writer

Serializes run results to a single CSV or JSON file. Every artifact starts
with the RunConfig that produced it, and nothing time-dependent is written,
so rerunning the embedded config reproduces the file byte for byte.

CSV layout:

    # config: {"subcommand": "simulate", ...}
    # table: moments
    s,mean,stderr
    ...

    # table: ecdf
    ...
"""

import io
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json')
CONFIG_PREFIX = '# config: '
TABLE_PREFIX = '# table: '
FLOAT_FORMAT = '%.17g'


def _json_default(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def _summary_table(summary: Dict[str, Any]) -> pd.DataFrame:
    return pd.DataFrame(
        [(key, _json_default(value) if isinstance(value, (Fraction, np.generic)) else value)
         for key, value in summary.items()],
        columns=['key', 'value'],
    )


class ArtifactWriter:
    """
    Writes one artifact per run.

    Args:
        output_format: csv or json
    """

    def __init__(self, output_format: str = 'csv'):
        output_format = getattr(output_format, 'value', output_format)
        if output_format not in FORMATS:
            raise ValueError(f"Unknown output format: {output_format}")
        self.output_format = output_format

    def write(self, result) -> Path:
        """
        Write result (a RunResult) to result.config.output_path.

        Returns:
            Path of the written artifact
        """
        path = Path(result.config.output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if self.output_format == 'csv':
            text = self.render_csv(result.config, result.tables, result.summary)
        else:
            text = self.render_json(result.config, result.tables, result.summary)
        with open(path, 'w', newline='') as f:
            f.write(text)
        logger.debug(f"Wrote {len(result.tables)} tables to {path}")
        return path

    def render_csv(self, config, tables: Dict[str, pd.DataFrame],
                   summary: Dict[str, Any]) -> str:
        sections = [CONFIG_PREFIX + config.model_dump_json() + '\n']
        for name, table in list(tables.items()) + [('summary', _summary_table(summary))]:
            buffer = io.StringIO()
            buffer.write(TABLE_PREFIX + name + '\n')
            table.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
            sections.append(buffer.getvalue())
        return sections[0] + '\n'.join(sections[1:])

    def render_json(self, config, tables: Dict[str, pd.DataFrame],
                    summary: Dict[str, Any]) -> str:
        payload = {
            'config': json.loads(config.model_dump_json()),
            'tables': {name: table.to_dict(orient='records') for name, table in tables.items()},
            'summary': summary,
        }
        return json.dumps(payload, indent=2, default=_json_default) + '\n'


def read_csv_tables(path: Union[str, Path]) -> Dict[str, pd.DataFrame]:
    """Split a sectioned CSV artifact back into its tables (all columns as text)."""
    tables: Dict[str, pd.DataFrame] = {}
    name = None
    lines = []
    for line in Path(path).read_text().split('\n'):
        if line.startswith(TABLE_PREFIX):
            name, lines = line[len(TABLE_PREFIX):], []
        elif line.startswith(CONFIG_PREFIX):
            continue
        elif line == '':
            if name is not None:
                tables[name] = pd.read_csv(io.StringIO('\n'.join(lines)), dtype=str, keep_default_na=False)
                name = None
        else:
            lines.append(line)
    if name is not None:
        tables[name] = pd.read_csv(io.StringIO('\n'.join(lines)), dtype=str, keep_default_na=False)
    return tables
