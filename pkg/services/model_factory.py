import logging
from typing import Dict, List, Optional, Type

from config_schemas import MFSConfig
from errors import SceneParseError
from services.base_model import BaseForwardModel
from services.disk_model import DiskModel
from services.empty_model import EmptyModel
from services.point_model import PointModel
from services.polygon_obstacle_model import PolygonObstacleModel
from services.polygon_source_model import PolygonSourceModel
from services.scene_parser import KeyValueDocument, load_key_value_file, parse_key_value_text

logger = logging.getLogger(__name__)


class ModelFactory:
    """Factory for creating the forward model of a scene description"""

    # Registry of available scene types
    _models = [
        PointModel,
        DiskModel,
        PolygonSourceModel,
        PolygonObstacleModel,
        EmptyModel,
    ]

    @classmethod
    def detect_scene_type(cls, doc: KeyValueDocument) -> str:
        """Scene type from the `type` key, or by scoring required-key matches when it is absent"""
        declared = doc.get("type")
        if declared is not None:
            declared = declared.strip().lower()
            if cls._get_model_class(declared) is None:
                raise SceneParseError(
                    f"Unknown scene type '{declared}', expected one of {', '.join(cls.get_supported_scene_types())}",
                    line=doc.lines.get("type"),
                )
            return declared

        available = set(doc.keys())
        scores = []
        for model_class in cls._models:
            required = model_class.get_required_keys()
            priority = model_class.get_detection_priority()
            matches = len([key for key in required if key in available])

            # Calculate score: (matches * priority) / total_required
            if len(required) > 0:
                score = (matches * priority) / len(required)
            else:
                score = 0

            scores.append((score, model_class.get_scene_type()))
            logger.info(f"{model_class.get_scene_type()}: {matches}/{len(required)} keys match (score: {score:.2f})")

        best_score, best_type = max(scores, key=lambda item: item[0])
        if best_score == 0:
            raise SceneParseError("Cannot determine scene type: add a 'type' key")
        logger.info(f"Best match: {best_type} (score: {best_score:.2f})")
        return best_type

    @classmethod
    def create_model(
        cls,
        doc: KeyValueDocument,
        scene_type: Optional[str] = None,
        mfs: Optional[MFSConfig] = None,
    ) -> BaseForwardModel:
        """Build the scene and wrap it in its forward model; auto-detects the type when not given"""
        if scene_type is None:
            scene_type = cls.detect_scene_type(doc)

        model_class = cls._get_model_class(scene_type)
        if model_class is None:
            raise SceneParseError(f"Unknown scene type: {scene_type}")

        logger.info(f"Creating forward model for scene type: {scene_type}")
        scene = model_class.build_scene(doc)
        if model_class is PolygonObstacleModel:
            return PolygonObstacleModel(scene, mfs)
        return model_class(scene)

    @classmethod
    def from_text(cls, text: str, mfs: Optional[MFSConfig] = None) -> BaseForwardModel:
        return cls.create_model(parse_key_value_text(text), mfs=mfs)

    @classmethod
    def from_file(cls, path: str, mfs: Optional[MFSConfig] = None) -> BaseForwardModel:
        return cls.create_model(load_key_value_file(path), mfs=mfs)

    @classmethod
    def _get_model_class(cls, scene_type: str) -> Optional[Type[BaseForwardModel]]:
        model_map: Dict[str, Type[BaseForwardModel]] = {m.get_scene_type(): m for m in cls._models}
        return model_map.get(scene_type)

    @classmethod
    def get_supported_scene_types(cls) -> List[str]:
        return [m.get_scene_type() for m in cls._models]

    @classmethod
    def validate_scene(cls, doc: KeyValueDocument, scene_type: Optional[str] = None) -> dict:
        """Check which scene types the entries satisfy; one type when given, otherwise all"""
        results = {}
        classes = cls._models if scene_type is None else [cls._get_model_class(scene_type)]
        for model_class in classes:
            if model_class is None:
                results[scene_type] = {"valid": False, "error": f"Unknown scene type: {scene_type}"}
                continue
            name = model_class.get_scene_type()
            results[name] = {
                "valid": model_class.validate_keys(doc.keys()),
                "keys_found": doc.keys(),
                "expected_keys": model_class.get_required_keys(),
            }
        return results
