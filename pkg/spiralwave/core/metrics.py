from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram

# Dedicated registry so repeated imports in tests do not collide with the default one
REGISTRY = CollectorRegistry()

SOLVER_LATENCY = Histogram(
    'spiralwave_solver_latency_seconds',
    'Solver operation latency in seconds',
    ['operation'],
    buckets=(0.001, 0.005, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0, 60.0),
    registry=REGISTRY,
)

NEWTON_ITERATIONS = Counter(
    'spiralwave_newton_iterations_total',
    'Total Newton iterations performed',
    ['solver'],
    registry=REGISTRY,
)

SOLVER_FAILURES = Counter(
    'spiralwave_solver_failures_total',
    'Total solver failures by reason',
    ['operation', 'reason'],
    registry=REGISTRY,
)

PRUFER_SHOTS = Counter(
    'spiralwave_prufer_shots_total',
    'Total Prufer shooting integrations',
    ['surface'],
    registry=REGISTRY,
)

BRANCH_POINTS = Gauge(
    'spiralwave_branch_points',
    'Accepted points on the last continued branch',
    ['m', 'n'],
    registry=REGISTRY,
)

JACOBIAN_CONDITION = Gauge(
    'spiralwave_bordered_jacobian_condition',
    'Estimated 1-norm condition number of the last bordered Jacobian',
    registry=REGISTRY,
)
