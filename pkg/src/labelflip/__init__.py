"""Bias binary classifiers toward fewer false negatives (or false positives) by label-flip retraining."""

from .bias_methods import (BiasPlan, Direction, FlipPool, FlipRecord, SelectionPolicy, apply_label_flip,
                           ensemble_scores, identify_pool, round_half_up, run_label_flip_method,
                           threshold_shift_predict, train_with_class_weights)
from .core import Dataset, Example, ScoreVector, SplitSpec, derive_seed, relabel, split_dataset
from .metrics import ConfusionMatrix, MetricsReport, auroc, confusion_at_threshold, evaluate, f1, precision, recall
from .models import (Classifier, ClassifierSpec, TrainConfig, gradient_check, predict_scores, train,
                     weighted_bce_loss)

__version__ = "0.1.0"
