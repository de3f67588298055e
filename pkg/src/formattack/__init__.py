"""Toolkit for attacking form field-extraction systems and measuring the
resulting end-to-end F1 degradation."""

from .docmodel import (
    BoundingBox,
    CorpusError,
    CorpusParseError,
    Document,
    DocumentInvariantError,
    FieldAnnotation,
    Word,
    WordRole,
    load_corpus,
    round_trip,
    word_roles,
    write_corpus,
)
from .extract import (
    BaselineConfig,
    ExtractionResult,
    FieldConfig,
    baseline_extract,
    external_extract,
    make_extractor,
    postprocess,
    run_extractor,
)
from .geometry import NeighborZone, iou, neighbors, union_neighbors, value_zone
from .metrics import (
    CorpusScore,
    FieldScore,
    RobustnessReport,
    build_report,
    score_corpus,
)
from .sweep import SweepPlan, enumerate_chains, run_sweep
from .synth import synth_corpus
from .transforms import (
    REGISTRY,
    REGISTRY_ORDER,
    SWEEP_NAMES,
    TransformSpec,
    apply_chain,
    apply_spec,
)
from .typedgen import (
    SynonymLexicon,
    apply_typo,
    derive_rng,
    derive_seed,
    gen_date,
    gen_money,
    gen_number,
    synonym,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
