# Gathering that survives corrupted starts.
#
# For two robots: each active robot jumps onto the other with probability
# 1/2, so they meet in 2 instants on average under full activation.
#
# For three or more: the composition scatters while two or more positions
# are crowded, then a deterministic rule builds one crowded point and pulls
# the farthest robot in, one mover per instant. It works from any start,
# including robots stacked on top of each other.

import numpy as np

from scattersim import (
    Capabilities,
    ProtocolSpec,
    Robot,
    Scenario,
    SchedulerSpec,
    as_configuration,
    gather_stats,
    run,
)

# Two robots, one unit apart, travel bound covering the gap.
steps = []
for seed in range(2000):
    scenario = Scenario(
        robots=(Robot(0, 1.0), Robot(1, 1.0)),
        initial=as_configuration([(0, 0), (1, 0)]),
        caps=Capabilities(),
        scheduler=SchedulerSpec("full_synchronous"),
        protocol=ProtocolSpec("pair_gather"),
        seed=seed,
        max_steps=1000,
        stop_rule="gathered",
    )
    steps.append(len(run(scenario).records))
print(f"pair gathering: mean {np.mean(steps):.2f} instants (expected 2.0)")

# Five robots from a corrupted configuration: two stacked pairs.
rng = np.random.default_rng(3)
scenarios = []
for seed in range(200):
    pts = rng.uniform(-2, 2, (3, 2))
    positions = [tuple(pts[0])] * 2 + [tuple(pts[1])] * 2 + [tuple(pts[2])]
    scenarios.append(
        Scenario(
            robots=tuple(Robot(i, 1.0) for i in range(5)),
            initial=as_configuration(positions),
            caps=Capabilities(multiplicity_detection=True, localization_knowledge=True),
            scheduler=SchedulerSpec("bounded_delay", 4),
            protocol=ProtocolSpec("stabilized_gather"),
            seed=seed,
            max_steps=10_000,
            stop_rule="gathered",
        )
    )
summary = gather_stats(scenarios)
print(
    f"five robots, corrupted starts: {summary.gathered}/{summary.trials} gathered, "
    f"mean {summary.mean_steps:.1f}, worst {summary.max_steps} instants"
)
