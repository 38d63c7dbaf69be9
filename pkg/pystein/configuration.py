# -*- coding: utf-8 -*-
"""Sweep settings

Settings are json files with one section per step plus the "output"
section. A model file only lists the values that differ from
settings_pystein.json, the merged result is checked against
settings_schema.json before any step sees it.
"""

import json
import logging
from os.path import dirname, join

import jsonschema

logger = logging.getLogger(__name__)

if int(jsonschema.__version__.split(".")[0]) < 3:  # pragma: no cover
    logger.warning(
        "Jsonschema %s found, but at least 3.0.0 is required to validate settings. "
        "Skipping the validation.",
        jsonschema.__version__,
    )
    hasJsonSchema = False
else:
    hasJsonSchema = True

#:str: the settings shipped with the package
SETTINGS_DIR = join(dirname(__file__), "settings")
#:str: defaults of every step
DEFAULT_FILE = "settings_pystein.json"
#:str: schema of a complete configuration
SCHEMA_FILE = "settings_schema.json"
#:dict: settings file of each model
MODEL_FILES = {
    "curie_weiss": "settings_CURIE_WEISS.json",
    "monomer_dimer": "settings_MONOMER_DIMER.json",
}


def model_name(model):
    """Canonical model name, e.g. "Curie-Weiss" -> "curie_weiss" """
    if model is None:
        return "pystein"
    return str(model).replace("-", "_").lower()


def _read_json(fname):
    # a path, or the name of a file in the settings directory
    try:
        with open(fname) as f:
            return json.load(f)
    except FileNotFoundError:
        with open(join(SETTINGS_DIR, fname)) as f:
            return json.load(f)


def get_configuration_for_model(model, **kwargs):
    """
    The default configuration of a model

    Parameters
    ----------
    model : str, None
        "curie_weiss", "monomer_dimer", or None for the plain defaults
    **kwargs
        values that replace the key of the same name in every section

    Returns
    -------
    config : dict
    """
    model = model_name(model)
    if model == "pystein":
        fname = DEFAULT_FILE
    elif model in MODEL_FILES:
        fname = MODEL_FILES[model]
    else:
        raise ValueError(f"Unknown model {model}, expected one of {list(MODEL_FILES)}")

    config = load_config(join(SETTINGS_DIR, fname), model)
    for section in config.values():
        if not isinstance(section, dict):
            continue
        for key, value in kwargs.items():
            if key in section:
                section[key] = value
    return config


def load_config(configuration, model, j=0):
    """
    Merge a configuration into the defaults and validate it

    Parameters
    ----------
    configuration : None, dict, list, str
        None uses the defaults of the model. A dict is either a
        configuration, or maps model names to configurations. Lists are
        indexed with j, strings are file names (absolute, relative, or in
        the settings directory).
    model : str
        the model the configuration is used for
    j : int, optional
        index into a list of configurations (default: 0)

    Returns
    -------
    settings : dict
        the complete configuration

    Raises
    ------
    KeyError
        if the configuration names a different model in "__model__"
    ValueError
        if the merged configuration does not match the schema
    """
    model = model_name(model)
    if configuration is None:
        logger.info("No configuration specified, using the defaults of %s", model)
        return get_configuration_for_model(model)

    if isinstance(configuration, dict):
        tag = configuration.get("__model__")
        if model in configuration:
            config = configuration[model]
        elif tag is None or tag in (model.upper(), "DEFAULT"):
            config = configuration
        else:
            raise KeyError(f"This configuration is for {tag}, not {model}")
    elif isinstance(configuration, list):
        config = configuration[j]
    elif isinstance(configuration, str):
        config = configuration
    else:
        raise TypeError(f"Unsupported configuration type {type(configuration)}")

    if isinstance(config, str):
        logger.info("Loading configuration from %s", config)
        config = _read_json(config)

    settings = update(read_config(), config)
    validate_config(settings)
    logger.debug("Configuration of %s is valid", model)
    return settings


def update(dict1, dict2, check=True, name="dict1"):
    """
    Recursively copy the entries of dict2 into dict1

    Nested dicts are merged key by key, every other value replaces
    the old one.

    Parameters
    ----------
    dict1 : dict
        dict that is modified in place
    dict2 : dict
        the new values
    check : bool, optional
        warn about keys of dict2 that dict1 does not have (default: True)
    name : str, optional
        name of dict1 in the warning

    Returns
    -------
    dict1 : dict
    """
    for key, value in dict2.items():
        if check and key not in dict1:
            logger.warning("%s is not contained in %s", key, name)
        if isinstance(value, dict) and isinstance(dict1.get(key), dict):
            dict1[key] = update(dict1[key], value, check=check, name=key)
        else:
            dict1[key] = value
    return dict1


def read_config(fname=DEFAULT_FILE):
    """The json file fname from the settings directory, by default the defaults"""
    with open(join(SETTINGS_DIR, fname)) as f:
        return json.load(f)


def validate_config(config):
    """
    Check a configuration against settings_schema.json

    Skipped with a warning at import if jsonschema is older than 3.

    Raises
    ------
    ValueError
        naming the offending field, e.g. "oracle.max_n: 1 is less than the
        minimum of 2"
    """
    if not hasJsonSchema:  # pragma: no cover
        return
    schema = read_config(SCHEMA_FILE)
    try:
        jsonschema.validate(schema=schema, instance=config)
    except jsonschema.ValidationError as ve:
        field = ".".join(str(p) for p in ve.absolute_path)
        logger.error("Configuration failed validation check.\n%s", ve.message)
        raise ValueError(f"{field}: {ve.message}" if field else ve.message)
