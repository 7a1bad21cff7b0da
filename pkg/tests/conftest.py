import sys
from pathlib import Path

import pytest

from dynconn.forest import available_backends

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(params=sorted(available_backends()))
def backend(request):
    """Run structure tests against every built core."""
    return request.param


@pytest.fixture
def forest_cls(backend):
    return available_backends()[backend]
