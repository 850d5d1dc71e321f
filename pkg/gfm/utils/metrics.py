import threading

import structlog
from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

logger = structlog.get_logger(__name__)

REGISTRY = CollectorRegistry()

# Metrics
ORACLE_CALLS = Counter(
    'gfm_oracle_calls_total',
    'Total number of value-oracle calls spent by optimization',
    ['algorithm'],
    registry=REGISTRY,
)

EVALUATION_CALLS = Counter(
    'gfm_evaluation_oracle_calls_total',
    'Oracle calls spent on reference batches and final values',
    ['algorithm'],
    registry=REGISTRY,
)

RUN_DURATION = Histogram(
    'gfm_run_duration_seconds',
    'Wall time of a single optimizer run',
    ['algorithm'],
    registry=REGISTRY,
)

CHECK_OUTCOMES = Counter(
    'gfm_checks_total',
    'Verification check outcomes',
    ['check', 'result'],
    registry=REGISTRY,
)


def track_run(algorithm: str, oracle_calls: int, evaluation_calls: int, duration: float):
    """Track one finished optimizer run"""
    ORACLE_CALLS.labels(algorithm=algorithm).inc(oracle_calls)
    EVALUATION_CALLS.labels(algorithm=algorithm).inc(evaluation_calls)
    RUN_DURATION.labels(algorithm=algorithm).observe(duration)


def track_check(check_name: str, passed: bool):
    """Track a verification outcome"""
    CHECK_OUTCOMES.labels(check=check_name, result="pass" if passed else "fail").inc()


def write_metrics(path) -> None:
    """Dump the registry in text exposition format"""
    write_to_textfile(str(path), REGISTRY)
    logger.debug("Metrics written", path=str(path))


class OracleCounter:
    """Thread-safe tally of value-oracle invocations"""

    def __init__(self):
        self._lock = threading.Lock()
        self.calls = 0

    def add(self, n: int = 1):
        with self._lock:
            self.calls += int(n)

    def reset(self):
        with self._lock:
            self.calls = 0
