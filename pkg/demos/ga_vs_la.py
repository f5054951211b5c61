"""Compare the automaton against the genetic-algorithm baseline.

Both methods see the same noisy scene and the same edge samples per seed.
The table reports mean time, success rate (error score below 1) and mean
error score, the same columns as a classic detector comparison table.
"""

from lacircles.bench import CircleShape, SceneSpec, run_trials

scene = SceneSpec(200, 200, (CircleShape(100, 100, 40),), noise_fraction=0.02)
runs = 20
la = run_trials(scene, "la", runs, base_seed=0, scene_seed=2000)
ga = run_trials(scene, "ga", runs, base_seed=0, scene_seed=2000)
print(f"{runs} runs per method on one 200x200 scene with 2% noise")
print(la.table_row("LA"))
print(ga.table_row("GA"))

worst_la = max(la.records, key=lambda r: r.es)
worst_ga = max(ga.records, key=lambda r: r.es)
print(f"worst LA run: seed {worst_la.seed}, ES {worst_la.es:.3f}")
print(f"worst GA run: seed {worst_ga.seed}, ES {worst_ga.es:.3f}")
