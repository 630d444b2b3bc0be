"""
Report Writer
=============
Renders command results as CSV, JSON or a console table, writes them to
stdout or a file, and reads distribution files back for the fidelity
command.

Output rules:
- CSV: comma separated, header row, "\\n" line endings, UTF-8
- JSON: one object per report, insertion key order, indent=2, trailing newline
- Floats in CSV/JSON use the shortest repr that round-trips, except where a
  fixed number of decimals is requested (phases/delta: 6, fidelity: 4)
"""

import io
import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from ampm_errors import ValidationError

logger = logging.getLogger(__name__)

PHASE_DECIMALS = 6
FIDELITY_DECIMALS = 4
FORMATS = ("table", "json", "csv")


@dataclass
class RunReport:
    """Result of `run`: instance, schedule, exact distribution and optional samples."""
    n: int
    targets: list
    M: int
    lam: float
    schedule: dict
    p_success: float
    p_predicted: float
    distribution: list
    shots: int = None
    seed: int = None
    counts: list = field(default=None)
    sampled_fidelity: float = None

    def to_dict(self):
        report = {
            "instance": {"n": self.n, "M": self.M, "lambda": self.lam, "targets": list(self.targets)},
            "schedule": self.schedule,
            "p_success": self.p_success,
            "p_predicted": self.p_predicted,
            "distribution": list(self.distribution),
        }
        if self.shots is not None:
            report["sampling"] = {
                "shots": self.shots,
                "seed": self.seed,
                "counts": list(self.counts),
                "fidelity": self.sampled_fidelity,
            }
        return report


# =============================================================================
# FORMATTING
# =============================================================================

def fmt_float(value):
    """Shortest round-trip representation."""
    return repr(float(value))


def fmt_fixed(value, decimals=PHASE_DECIMALS):
    text = f"{float(value):.{decimals}f}"
    # Avoid "-0.000000"
    if float(text) == 0.0:
        text = f"{0.0:.{decimals}f}"
    return text


def render_csv(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def render_json(payload):
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def render_table(title, lines):
    """Console block in the banner style used by the pipeline scripts."""
    out = ["=" * 70, f"   {title}", "=" * 70]
    out.extend(f"   {line}" for line in lines)
    out.append("=" * 70)
    return "\n".join(out) + "\n"


def read_csv(text):
    """Parse CSV text into (header, rows) with string cells."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValidationError("empty CSV input")
    return rows[0], rows[1:]


# =============================================================================
# OUTPUT
# =============================================================================

def emit(text, out_path=None, stream=None):
    """
    Write rendered output to a file (UTF-8, "\\n" newlines) or to a stream.

    Args:
        text: Rendered output
        out_path: Optional destination file
        stream: Text stream used when out_path is None
    """
    if out_path:
        path = Path(out_path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        logger.info("wrote %s", path)
        return path

    stream.write(text)
    return None


# =============================================================================
# DISTRIBUTION FILES
# =============================================================================

def load_distribution_values(path):
    """
    Read a probability vector from a CSV or JSON file.

    Accepted layouts:
        CSV  - header row with a "probability" column (other columns ignored),
               or a single unnamed column of numbers
        JSON - a list of numbers, or an object with "probs" or "distribution"

    Returns:
        List of floats (normalization is checked by the caller)
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"distribution file not found: {path}")

    text = path.read_text(encoding="utf-8")

    try:
        if path.suffix.lower() == ".json" or text.lstrip().startswith(("[", "{")):
            values = _values_from_json(text)
        else:
            values = _values_from_csv(text)
    except (ValueError, TypeError, KeyError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"{path}: malformed distribution file ({e})") from e

    if not values:
        raise ValidationError(f"{path}: no probabilities found")
    return values


def _values_from_json(text):
    payload = json.loads(text)
    if isinstance(payload, dict):
        for key in ("probs", "distribution"):
            if key in payload:
                payload = payload[key]
                break
        else:
            raise ValidationError('JSON object needs a "probs" or "distribution" key')
    if not isinstance(payload, list):
        raise ValidationError("JSON distribution must be a list of numbers")
    return [float(v) for v in payload]


def _values_from_csv(text):
    header, rows = read_csv(text)
    lowered = [h.strip().lower() for h in header]

    if "probability" in lowered:
        column = lowered.index("probability")
        return [float(row[column]) for row in rows if row]

    # Headerless single column
    return [float(row[0]) for row in [header] + rows if row]
