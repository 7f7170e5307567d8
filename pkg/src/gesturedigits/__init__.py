"""Hand-gesture digit recognition toolkit.

Subpackages:
    nn        -- dense-tensor math, differentiable layers, SGD, gradient checking
    imaging   -- color conversion, skin segmentation, morphology, shape features
    dataset   -- YOLO/VOC annotation formats, label maps, splits, synthetic data
    models    -- gesture classifier, grid detector, feature store, checkpoints
    harness   -- training/evaluation loops, metrics export, inference pipelines
    service   -- HTTP annotation service
"""

__version__ = "0.1.0"
