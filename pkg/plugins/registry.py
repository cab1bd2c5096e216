"""
Experiment registry for Hilbert Embedding Lab.

Discovery imports every module of the plugins package, collects the
ExperimentBase subclasses defined there and files them under their
experiment id in run order.
"""

import importlib
import inspect
import logging
import pkgutil
from dataclasses import dataclass
from pathlib import Path
from types import ModuleType
from typing import Iterator, Optional

from core.schemas import ExperimentDefinition
from plugins.base import ExperimentBase


logger = logging.getLogger(__name__)

# Order in which `all` runs the experiments; unknown ids run after these
RUN_ORDER = ["metric", "action", "spin", "uncertainty", "packet", "born", "diffuse"]

_NOT_EXPERIMENTS = {"base", "registry"}


@dataclass(frozen=True)
class _Entry:
    experiment_class: type[ExperimentBase]
    definition: ExperimentDefinition


def _run_position(experiment_id: str) -> int:
    return RUN_ORDER.index(experiment_id) if experiment_id in RUN_ORDER else len(RUN_ORDER)


def _experiment_classes(module: ModuleType) -> Iterator[type[ExperimentBase]]:
    for _, obj in inspect.getmembers(module, inspect.isclass):
        if issubclass(obj, ExperimentBase) and not inspect.isabstract(obj) and obj.__module__ == module.__name__:
            yield obj


class ExperimentRegistry:
    """
    Experiments by id, kept sorted in run order.

    Each class is instantiated once at registration to read its
    definition; lookups hand out fresh instances.
    """

    def __init__(self):
        self._entries: dict[str, _Entry] = {}

    def register(self, experiment_class: type[ExperimentBase]) -> ExperimentDefinition:
        """
        Add an experiment class.

        Raises:
            ValueError: If its experiment_id is already taken
        """
        definition = experiment_class().get_definition()
        experiment_id = definition.experiment_id
        if experiment_id in self._entries:
            raise ValueError(f"Experiment '{experiment_id}' is already registered")
        if experiment_id not in RUN_ORDER:
            logger.warning("Experiment '%s' has no run position; `all` runs it last", experiment_id)

        entries = dict(self._entries)
        entries[experiment_id] = _Entry(experiment_class, definition)
        self._entries = dict(sorted(entries.items(), key=lambda item: _run_position(item[0])))
        logger.debug("Registered experiment %s v%s", experiment_id, definition.experiment_version)
        return definition

    def get_experiment(self, experiment_id: str) -> Optional[ExperimentBase]:
        entry = self._entries.get(experiment_id)
        return entry.experiment_class() if entry else None

    def get_definition(self, experiment_id: str) -> Optional[ExperimentDefinition]:
        entry = self._entries.get(experiment_id)
        return entry.definition if entry else None

    def list_experiments(self) -> list[ExperimentDefinition]:
        """Definitions in run order."""
        return [entry.definition for entry in self._entries.values()]

    def discover_experiments(self) -> list[str]:
        """
        Import the plugins package's modules and register what they define.

        A module that fails to import or register is logged and skipped.

        Returns:
            Ids registered by this call, in run order
        """
        found: list[str] = []
        for module_info in pkgutil.iter_modules([str(Path(__file__).parent)]):
            name = module_info.name
            if name in _NOT_EXPERIMENTS or name.startswith("_"):
                continue
            try:
                module = importlib.import_module(f"{__package__}.{name}")
            except Exception as e:
                logger.error("Cannot import experiment module %s: %s", name, e)
                continue
            for experiment_class in _experiment_classes(module):
                try:
                    found.append(self.register(experiment_class).experiment_id)
                except Exception as e:
                    logger.error("Cannot register %s.%s: %s", name, experiment_class.__name__, e)
        return sorted(found, key=_run_position)


_registry = ExperimentRegistry()


def get_registry() -> ExperimentRegistry:
    """The process-wide registry used by the CLI."""
    return _registry
