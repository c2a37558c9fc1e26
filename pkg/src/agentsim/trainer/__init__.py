from .bc import action_agreement, bc_update
from .curriculum import Lesson, LessonPlan, plan_from_config
from .gae import gae
from .icm import ICM
from .network import MLP, Adam, NonFiniteLoss, PolicyValueNet, ShapeMismatch, Topology
from .ppo import normalize_advantages, ppo_clip_loss, ppo_minibatch_update
from .run import TrainConfig, evaluate, load_model, save_model, train_run
from .selfplay import SnapshotPool, elo_update

__all__ = [
    "action_agreement", "bc_update", "Lesson", "LessonPlan",
    "plan_from_config", "gae", "ICM", "MLP", "Adam", "NonFiniteLoss",
    "PolicyValueNet", "ShapeMismatch", "Topology", "normalize_advantages",
    "ppo_clip_loss", "ppo_minibatch_update", "TrainConfig", "evaluate",
    "load_model", "save_model", "train_run", "SnapshotPool", "elo_update",
]
