
# Process environment defaults, applied by esdlab.bootstrap_env() for every
# key the environment does not already define.
env = {
    'ESDLAB_LOG_LEVEL': 'WARNING',
    'ESDLAB_FONT': 'DejaVu Sans',
    'ESDLAB_PAIRS_PER_SETTING': '10000',
    'ESDLAB_OPERATOR_CAP': '64',
}
