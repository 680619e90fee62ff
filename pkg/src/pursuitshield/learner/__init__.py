from .buffer import ReplayBuffer
from .nets import MLP, Adam
from .observation import OBS_DIM, heading_from_raw, observe, raw_from_heading
from .td3 import CheckpointError, TD3Agent, TD3Config, critic_targets

__all__ = [
    "MLP",
    "OBS_DIM",
    "Adam",
    "CheckpointError",
    "ReplayBuffer",
    "TD3Agent",
    "TD3Config",
    "critic_targets",
    "heading_from_raw",
    "observe",
    "raw_from_heading",
]
