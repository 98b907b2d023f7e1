"""byrne: character-driven soccer commentary replay.

Feeds pre-analysed game fact logs through a declarative character profile and
emits, per utterance, a SABLE speech script and a timed FACS/viseme facial
timeline. See the README for file formats and the `commentate` CLI.
"""

from .behaviors import (
    ActionUnitDirective,
    ActivatedBehavior,
    AuralEventDirective,
    BehaviorSpec,
    FacialExpressionDirective,
    MarkupDirective,
    MotivationPattern,
    Scope,
    SpeechTagDirective,
    activate_behaviors,
    arbitrate,
    expand,
)
from .emotions import (
    EMOTION_TYPES,
    DecayFunction,
    EmotionPool,
    EmotionRule,
    EmotionSchema,
    EmotionStructure,
    apply_rules,
    decay_pool,
    intensity_at,
    match_rule,
)
from .errors import ByrneError
from .facts import (
    FactBoard,
    GameFact,
    TickUpdate,
    apply_tick,
    parse_game_log,
    select_fact,
    should_interrupt,
)
from .pipeline import CommentaryEvent, PipelineState, initial_state, run_replay, step
from .profile import CharacterProfile, ProfileError, dump_profile, load_profile
from .seeml import (
    EXPRESSION_NAMES,
    Element,
    FacsEvent,
    OutputBundle,
    SeemlDocument,
    SeemlError,
    Text,
    TimedWord,
    VerifyError,
    VisemeEvent,
    apply_directives,
    format_face_timeline,
    lip_sync,
    merge_tags,
    parse_seeml,
    serialize_seeml,
    strip_text,
    verify_and_split,
)
from .style import StyleFile, load_style
from .textgen import (
    CoverageError,
    Template,
    UsageHistory,
    instantiate,
    record_usage,
    select_template,
)

__version__ = "0.1.0"
