from .make import (MissingScenarioError, correlations_table, load_scenarios,
                   make_figures, make_sensitivity_figure, relative_table)

__version__ = "0.1.0"

__all__ = ["MissingScenarioError", "correlations_table", "load_scenarios",
           "make_figures", "make_sensitivity_figure", "relative_table",
           "__version__"]
