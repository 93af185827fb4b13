"""AxWin Transformer layers, variants and checkpoints."""

from axwin.model.backbone import AxWinTransformer, Stage, Stem, backbone_forward, build_variant
from axwin.model.blocks import CPE, ICFFN, AxWinBlock, axwin_block, cpe, icffn
from axwin.model.checkpoint import load_checkpoint, save_checkpoint
from axwin.model.config import MSPE_BRANCHES, VARIANTS, VariantConfig, get_variant
from axwin.model.mspe import MSPE, mspe

__all__ = [
    "AxWinBlock",
    "AxWinTransformer",
    "CPE",
    "ICFFN",
    "MSPE",
    "MSPE_BRANCHES",
    "Stage",
    "Stem",
    "VARIANTS",
    "VariantConfig",
    "axwin_block",
    "backbone_forward",
    "build_variant",
    "cpe",
    "get_variant",
    "icffn",
    "load_checkpoint",
    "mspe",
    "save_checkpoint",
]
