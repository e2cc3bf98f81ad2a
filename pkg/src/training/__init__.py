"""
Training, optimisation and evaluation of SCGN
"""

from .loss import l1_loss
from .optim import AdamState, adam_step, clip_grad_norm
from .config import TrainConfig, PRESETS
from .evaluation import evaluate, predict
from .trainer import EpochRecord, TrainLog, train, run_ablation, LOG_FILE

__all__ = [
    'l1_loss',
    'AdamState', 'adam_step', 'clip_grad_norm',
    'TrainConfig', 'PRESETS',
    'evaluate', 'predict',
    'EpochRecord', 'TrainLog', 'train', 'run_ablation', 'LOG_FILE',
]
