"""Columnar spiking neural network with reward-modulated local learning."""
from .encoder import encode, spike_count
from .mnist_io import ImageSet, LabeledImage, load_images, load_labels, load_split
from .network import (Network, NetworkConfig, StepOutput, forward_step, infer, init_network,
                      load_checkpoint, predict_batch, save_checkpoint, silence_step)
from .plasticity import EpisodeLedger, PlasticityUpdate, apply_plasticity, record_step, train_on_image
from .resource import ResourceFunctionConfig, weight_classic, weight_linear
from .trainer import ExperimentReport, Metrics, evaluate, run_experiment, sweep, train_epoch

__version__ = "0.1.0"
