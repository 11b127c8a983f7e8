"""
A seeded Monte Carlo sweep over the privacy budget
==================================================

The harness reads the same ``key = value`` config that ``dpconnect simulate``
takes, runs every (graph, noise seed) pair with common random numbers across
sweep points, and writes a versioned CSV.  Rerunning gives identical bytes.
"""

from dpconnect.harness import parse_experiment_config, results_csv, run_experiment, summarize

config = """
generator = sbm2
n = 2000
p_within = 0.01
p_between = 0.005
sweep = eps_total
values = 1, 2, 4, 8
graphs = 5
noise_seeds = 5
seed = 11
"""

spec = parse_experiment_config(config)
rows = run_experiment(spec)
for value, s in summarize(rows).items():
    print(f"eps_total={value:<4}  mse={s['mse']:.3e}  median se={s['median_se']:.3e}  aborted={s['aborted']}/{s['n']}")

text = results_csv(rows, spec.sweep)
print(text.splitlines()[0])
print("identical on rerun:", text == results_csv(run_experiment(spec), spec.sweep))
