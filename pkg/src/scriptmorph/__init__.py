"""scriptmorph: rewrite-search engine for a mini scripting language.

Subpackages cover the strategy forest, the chat-model gateway, prompt
composition and vote judging, the layer-by-layer search itself, script
deduplication and the evaluation harness.
"""

__version__ = "0.1.0"
