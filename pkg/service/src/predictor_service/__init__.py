"""Model service: fine-tunes and serves the distractor-generation masked LM,
and exports dependency parses for the tree-kernel baseline."""

__version__ = "0.1.0"
