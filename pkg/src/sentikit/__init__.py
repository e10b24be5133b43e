"""Financial news sentiment toolkit.

Lexicon scorers (heuristic and counting), corpus ingestion, an
annotation workflow, a WordPiece tokenizer, TF-IDF features, classical
classifiers, and a bidirectional LSTM, all built for reproducible runs.
"""

__version__ = "0.1.0"
