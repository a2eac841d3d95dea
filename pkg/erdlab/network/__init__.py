from erdlab.network.embedding import time_embed
from erdlab.network.mlp import MlpConfig, MlpModel, LayerFactor, init, forward, loss_grad, param_jacobian
from erdlab.network.checkpoint import save_checkpoint, load_checkpoint
