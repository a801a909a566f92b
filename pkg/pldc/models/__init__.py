from .max_affine import MaxAffine
from .dataset import Dataset, Standardizer
from .pldc_model import PLDCModel
from .relu_net import ReluNet

# Export them for easy import
__all__ = ["MaxAffine", "Dataset", "Standardizer", "PLDCModel", "ReluNet"]
