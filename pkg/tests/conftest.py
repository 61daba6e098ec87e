import pytest

from rnnlab.training import NetworkConfig, TrainingSession


def small_config(**kw):
    """Tiny config so epoch-level tests stay fast."""
    base = dict(window=6, horizon=2, hidden=4, batch_size=2, batches_per_epoch=2)
    base.update(kw)
    return NetworkConfig(**base)


@pytest.fixture
def small_session():
    return TrainingSession.create(small_config(seed=5))
