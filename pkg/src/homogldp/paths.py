from importlib import resources

DEFAULTS_YAML = resources.files('homogldp.data').joinpath('defaults.yaml')
FIGURES_YAML = resources.files('homogldp.data').joinpath('figures.yaml')
