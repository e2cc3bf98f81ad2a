"""
NUC denoising toolkit - source packages
"""
