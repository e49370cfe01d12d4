import sys
import os

sys.path.append(os.path.abspath('..'))

project = 'hnp-density'
copyright = '2026, dzvenyslavavovk'
author = 'dzvenyslavavovk'


extensions = ['sphinx.ext.autodoc']

autodoc_member_order = 'bysource'

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

html_theme = 'alabaster'
html_static_path = ['_static']
