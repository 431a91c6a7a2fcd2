# Copyright 2026 The typobench Authors
# SPDX-License-Identifier: Apache-2.0
"""Typographic attack benchmark builder and scorer."""

import json

from ._core import (
    ProviderError,
    Taxonomy,
    ValidationError,
    box_distance,
    config_hash,
    extract_mc_choice,
    lcs_ratio,
    locate_key_text,
    normalize,
    normalized_edit_distance,
    run_cli,
    similarity,
    vqa_accuracy,
)

__all__ = [
    "ProviderError",
    "Taxonomy",
    "ValidationError",
    "box_distance",
    "config_hash",
    "default_config",
    "extract_mc_choice",
    "lcs_ratio",
    "locate_key_text",
    "normalize",
    "normalized_edit_distance",
    "run_cli",
    "similarity",
    "vqa_accuracy",
]


def default_config():
    """The built-in run configuration as a dict."""
    from ._core import default_config_json

    return json.loads(default_config_json())
