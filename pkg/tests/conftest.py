import numpy as np
import pytest

from ralab.linksim.link_model import LinkModel
from ralab.linksim.link_simulator import LinkSimulator
from ralab.linksim.rss_trace import RssTrace, TraceConfig
from ralab.linksim.sim_clock import SimClock
from ralab.backends.env_backend import BackendConfig, EnvBackendKind, EnvConfig, make_backend
from ralab.backends.latency import LatencyConfig, LatencyModel


@pytest.fixture
def link_model() -> LinkModel:
    return LinkModel()


@pytest.fixture
def clock() -> SimClock:
    return SimClock("virtual")


@pytest.fixture
def make_env_backend(link_model, clock, tmp_path):
    """Factory for a backend over a constant -50 dBm link on the virtual clock"""
    created = []

    def _make(kind: EnvBackendKind = EnvBackendKind.IN_MEMORY, latency: LatencyConfig = LatencyConfig(),
              level: float = -50.0, **backend_fields):
        backend_fields.setdefault("workdir", tmp_path / f"backend{len(created)}")
        backend_fields["workdir"].mkdir(exist_ok=True)
        config = EnvConfig(backend=BackendConfig(kind=kind, latency=latency, **backend_fields))
        simulator = LinkSimulator(link_model, RssTrace(TraceConfig(kind="constant", level=level)),
                                  rng=np.random.default_rng(1), start_ns=clock.now_ns())
        backend = make_backend(config, simulator, clock, LatencyModel(config.backend.latency,
                                                                       np.random.default_rng(2)),
                               np.random.default_rng(3))
        created.append(backend)
        return backend

    yield _make
    for backend in created:
        backend.close()
