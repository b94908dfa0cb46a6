"""SimVec chart toolkit.

Implements the SimVec simplified vector chart format (text grammar,
parser, serializer), SVG ingestion into SimVec, a synthetic chart/QA
corpus generator with chain-of-thought traces, historical-style chart
restyling, and reconstruction/QA evaluation metrics, all behind one CLI.
"""

__version__ = "0.1.0"

from .core import (
    HslQ,
    LineElement,
    NBBox,
    NPoint,
    PolygonElement,
    RectElement,
    SimVecDoc,
    SimVecError,
    SimVecParseError,
    TextElement,
    count_tokens,
    dequantize_color,
    parse_simvec,
    quantize_color,
    serialize_simvec,
    validate,
)
from .ingest import (
    AffineMatrix,
    IngestError,
    IngestOptions,
    Viewport,
    compose_transforms,
    ingest_svg,
    ingest_svg_full,
)

__all__ = [
    "HslQ", "NPoint", "NBBox", "TextElement", "RectElement", "LineElement",
    "PolygonElement", "SimVecDoc", "SimVecError", "SimVecParseError",
    "parse_simvec", "serialize_simvec", "validate", "quantize_color",
    "dequantize_color", "count_tokens",
    "AffineMatrix", "Viewport", "IngestError", "IngestOptions",
    "compose_transforms", "ingest_svg", "ingest_svg_full",
    "__version__",
]
