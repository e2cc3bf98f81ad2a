"""
Constants shared across packages
"""

FORMAT_REVISION = 1
TENSOR_MAGIC = b"NUCTENS1"
TENSOR_ALIGN = 64
TENSOR_SUFFIX = ".tensor"

PIXEL_PEAK = 255.0
SD_EPSILON = 1e-5
PSNR_CAP_DB = 99.0
BINARIZE_THRESHOLD = 127.5

VALIDATION_SEED_OFFSET = 1_000_003


class PadMode:
    NONE = 'none'
    ZERO = 'zero'
    MIRROR = 'mirror'


class PoolMode:
    AVG = 'avg'
    MAX = 'max'


class RenderMode:
    CLEAN = 'clean'
    GROUNDTRUTH = 'groundtruth'


class Method:
    SCGN = 'scgn'
    GAUSSIAN = 'gaussian'
    IDENTITY = 'identity'
    ORACLE = 'oracle'

    ALL = (SCGN, GAUSSIAN, IDENTITY, ORACLE)
