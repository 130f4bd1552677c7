"""Sanskrit sandhi joining and splitting with character-level LSTMs."""

try:
    from ._sandhi import *  # noqa: F401,F403
    from ._sandhi import SandhiError
except ImportError:  # in-tree build: the extension sits next to the package
    from _sandhi import *  # noqa: F401,F403
    from _sandhi import SandhiError

__all__ = [
    "SandhiError",
    "Joiner",
    "Splitter",
    "annotate_window",
    "apply_rule",
    "apply_rules",
    "best_window",
    "classify_phoneme",
    "classify_sandhi_type",
    "devanagari_to_slp1",
    "filter_triple",
    "generate_synthetic",
    "is_slp1_word",
    "itrans_to_slp1",
    "slp1_to_devanagari",
    "train_joiner",
    "train_splitter",
]
