"""Delay-attack-resilient time synchronization simulator.

Thin wrapper around the compiled core. All durations and timestamps are
integer nanoseconds.
"""

import json as _json

try:
    from . import _core  # installed wheel layout
except ImportError:  # in-tree build: extension module on sys.path
    import _core

globals().update(
    {name: getattr(_core, name) for name in dir(_core) if not name.startswith("_")}
)
__all__ = [name for name in dir(_core) if not name.startswith("_")] + [
    "run_scenario_file"
]


def run_scenario_file(path, mode=None, seed=None):
    """Load and run a scenario file.

    Returns (RunOutput, summary dict). ``mode`` and ``seed`` override the
    scenario's protocol mode and RNG seed.
    """
    scenario = _core.load_scenario(str(path))
    if mode is not None:
        scenario = _core.with_mode(scenario, mode)
    if seed is not None:
        scenario = _core.with_seed(scenario, seed)
    output = _core.run_scenario(scenario)
    summary = _json.loads(_core.render_summary_json(scenario, output))
    return output, summary
