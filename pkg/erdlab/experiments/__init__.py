import importlib
import pkgutil

from loguru import logger

from erdlab.experiments.experiment import AbstractExperiment, RunContext


# Import every experiment module so AbstractExperiment sees its subclasses
def import_experiments():
    for module in pkgutil.iter_modules(__path__):
        if not module.name.startswith("_"):
            importlib.import_module(f"{__name__}.{module.name}")
    logger.debug(f"Registered experiments {AbstractExperiment.names()}")


import_experiments()
