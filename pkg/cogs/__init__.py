from typing import TYPE_CHECKING
from .data import DataCog
from .experiments import ExperimentsCog
from .inference import InferenceCog
from .training import TrainingCog
from .uci import UciCog
if TYPE_CHECKING:
    from util.ruleforge_cli import RuleForgeCli


def setup(app: 'RuleForgeCli'):
    # Add cogs
    DataCog(app)
    TrainingCog(app)
    InferenceCog(app)
    ExperimentsCog(app)
    UciCog(app)
