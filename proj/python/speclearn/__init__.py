"""Specification learning from synthetic tabletop demonstrations."""

from ._core import (
    EntailedDistribution,
    LossWeights,
    ObjectKind,
    RefinementTrace,
    Scene,
    SceneObject,
    SpecModel,
    Split,
    UserType,
    Vec2,
    augment_scene,
    bezier_eval,
    bezier_fit,
    entailed_validity,
    generate_scene,
    oracle_validity,
    refine_trajectory,
    render_scene,
    sample_trajectory,
    scene_from_files,
    scene_to_files,
    synthesize_demonstrations,
)

__all__ = [
    "EntailedDistribution",
    "LossWeights",
    "ObjectKind",
    "RefinementTrace",
    "Scene",
    "SceneObject",
    "SpecModel",
    "Split",
    "UserType",
    "Vec2",
    "augment_scene",
    "bezier_eval",
    "bezier_fit",
    "entailed_validity",
    "generate_scene",
    "oracle_validity",
    "refine_trajectory",
    "render_scene",
    "sample_trajectory",
    "scene_from_files",
    "scene_to_files",
    "synthesize_demonstrations",
]
