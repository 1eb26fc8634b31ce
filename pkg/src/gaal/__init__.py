"""Active learning by query synthesis: a GAN trained on the unlabeled pool
synthesizes boundary-proximal training instances for an oracle to label,
benchmarked against pool-based and passive baselines."""

__version__ = "0.1.0"
