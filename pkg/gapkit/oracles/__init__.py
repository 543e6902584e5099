from gapkit.oracles.base_oracle import BaseTrendOracle
from gapkit.oracles.oracle import TrendOracle
