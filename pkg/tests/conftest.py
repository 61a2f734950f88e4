import sys
from pathlib import Path

import pytest

from crowdcap.grammar import all_labels

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def labels():
    return [c.text for c in all_labels()]


@pytest.fixture
def seven_of_eight(labels):
    """Eight label references; the last prediction gets the direction wrong."""
    predictions = list(labels)
    predictions[-1] = "few people run in"
    assert labels[-1] == "few people run out"
    return predictions, labels
