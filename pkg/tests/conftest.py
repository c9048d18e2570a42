import pytest

from abnormal_forge import ConstructionConfig, Mode, construct
from abnormal_forge.seed import ListDigitSource

# Hand-checked demonstration case: seed digits [1,2,3,1], one block of
# four, base 2. The planner must land on inserts (1, 2, 555, 2**225 + 1)
# with denominators 23, 59 and 32768 = 2**15.
WORKED_SEED = [1, 2, 3, 1]


@pytest.fixture
def worked_number():
    config = ConstructionConfig(block_size=4, blocks=1,
                                mode=Mode.parse("paper"))
    return construct(config, ListDigitSource(WORKED_SEED))
