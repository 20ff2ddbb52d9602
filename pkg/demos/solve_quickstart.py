"""Quickstart: build a small project in code and solve it.

The project below has six real activities sharing two renewable
resources.  We solve it with a modest schedule budget and print the
resulting start times next to the critical-path lower bound, then show
how the record makespan improved as schedules were generated.
"""

from rcpsp_hybrid import (
    Activity,
    ProjectInstance,
    SolverConfig,
    critical_path_lower_bound,
    solve,
)

# Activities 0 and 7 are the dummy source and sink.  Each activity lists
# its duration and its per-resource demand.
activities = [
    Activity(0, 0, (0, 0)),
    Activity(1, 3, (2, 0)),
    Activity(2, 4, (3, 1)),
    Activity(3, 2, (0, 4)),
    Activity(4, 5, (2, 2)),
    Activity(5, 3, (1, 3)),
    Activity(6, 2, (4, 0)),
    Activity(7, 0, (0, 0)),
]
arcs = {
    (0, 1), (0, 2), (0, 3),
    (1, 4), (2, 4), (2, 5), (3, 5),
    (4, 6), (5, 6),
    (6, 7),
}
project = ProjectInstance(activities, arcs, capacities=(4, 4), name="quickstart")

config = SolverConfig(lambda_budget=2000, population_capacity=10, seed=7)
schedule, stats = solve(project, config)

print(f"critical-path lower bound : {critical_path_lower_bound(project)}")
print(f"relaxation lower bound    : {stats.relaxed_makespan}")
print(f"best makespan found       : {schedule.makespan}")
print(f"schedules generated       : {stats.schedules_generated}")
print()
print("activity  start  finish")
for act in activities:
    s = schedule.starts[act.id]
    print(f"{act.id:>8}  {s:>5}  {s + act.duration:>6}")
print()
print("record trace (schedules generated -> best makespan):")
for used, makespan in stats.trace:
    print(f"  {used:>6} -> {makespan}")
