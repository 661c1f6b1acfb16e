"""Grounded scene understanding toolkit: verb frames with template captions,
box and mask geometry, situation-recognition metrics, a segmenter client with
a deterministic fallback, scene bundles, and point/region resolution."""

__version__ = "0.1.0"

from .errors import (
    BuildError,
    CodecError,
    GeometryError,
    NotFoundError,
    ParseError,
    ProtocolError,
    RangeError,
    SchemaError,
    SegmenterTimeout,
    ToolkitError,
    TransportError,
    ValidationError,
)
from .frames import (
    FrameLexicon,
    Role,
    VerbFrame,
    load_lexicon,
    load_noun_table,
    make_frame,
    render_caption,
    roles_of,
    validate_situation,
)
from .geometry import (
    BoundingBox,
    EntityMask,
    RleMask,
    box_iou,
    box_to_mask,
    covering_set,
    make_disjoint,
    rle_decode,
    rle_encode,
)
from .metrics import (
    EvalReport,
    SampleFlags,
    Setting,
    aggregate,
    eval_sample,
    evaluate_dataset,
    format_report,
)
from .numerics import (
    ConvergenceConfig,
    gelu,
    gelu_grad,
    relu,
    relu_grad,
    run_convergence_lab,
)
from .pipeline import (
    GroundedSituation,
    SceneBundle,
    SituationEntry,
    build_scene,
    load_bundle,
    save_bundle,
    situation_from_annotation,
    situation_from_prediction,
)
from .roi import (
    AmbiguityReport,
    ResolveResult,
    ambiguity_report,
    resolve_center,
    resolve_point,
    resolve_region,
)
from .segmenter import (
    BoxFillBackend,
    FileBackend,
    HttpBackend,
    SegmentRequest,
    SegmentResponse,
    probe,
    segment,
)
from .swig_data import (
    Annotation,
    Prediction,
    dataset_stats,
    parse_annotations,
    parse_predictions,
)
