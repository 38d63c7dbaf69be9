# -*- coding: utf-8 -*-
#
# Sphinx configuration of the PyStein documentation
#
import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(__file__, "../..")))

from pystein import __version__

project = "PyStein"
copyright = "2026, PyStein developers"
author = "PyStein developers"
version = __version__.split("+")[0]
release = __version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
]
autodoc_member_order = "bysource"
napoleon_numpy_docstring = True

master_doc = "index"
exclude_patterns = ["_build"]
pygments_style = "sphinx"
html_theme = "alabaster"
htmlhelp_basename = "PySteindoc"
man_pages = [(master_doc, "pystein", "PyStein Documentation", [author], 1)]
