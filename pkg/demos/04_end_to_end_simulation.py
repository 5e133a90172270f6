"""End to end: simulate a doorway, run the engine, score against ground truth.

The simulator owns the answer key (events implied by the noiseless actor
paths), so the engine can be graded exactly, including under injected
detector noise.
"""
import math

import headcount as hc

DIM = 64

print("catalog:", ", ".join(hc.catalog_names()))

# --- noiseless scenarios should be reproduced exactly
print("\nnoiseless scenarios:")
for name in ["clean_entry", "clean_exit", "crossing_pair", "multi_3", "distraction_field"]:
    frames, truth = hc.generate(hc.make_scenario(name, DIM))
    result = hc.run_frames(frames)
    report = hc.evaluate(result.ledger, truth)
    print(
        f"  {name:18s} truth ({truth.final_ins:2d} in, {truth.final_outs:2d} out) "
        f"engine ({result.ledger.ins:2d}, {result.ledger.outs:2d})  accuracy {report.accuracy_percent}%"
    )

# --- dropouts: ids survive gaps up to the miss limit, then the track splits
print("\ndetector dropouts mid-crossing (miss limit = 5):")
for k in [3, 5, 8]:
    frames, _ = hc.generate(hc.make_scenario(f"dropout_{k}", DIM))
    result = hc.run_frames(frames)
    print(
        f"  gap of {k} frames -> entries {result.ledger.ins}, ids used {result.track_ids_issued}"
    )

# --- moderate noise: misses, embedding perturbation, center jitter
base = hc.TrackerConfig()
sigma = math.sqrt(0.5 * base.feature_threshold / DIM)
noise = hc.NoiseSpec(miss_probability=0.1, embedding_noise_sigma=sigma, center_jitter_sigma=0.02)
total = errors = 0
for seed in range(10):
    spec = hc.random_crossings(seed, actors=4, noise=noise, embedding_dim=DIM)
    frames, truth = hc.generate(spec)
    result = hc.run_frames(frames)
    total += truth.final_ins + truth.final_outs
    errors += abs(result.ledger.ins - truth.final_ins) + abs(result.ledger.outs - truth.final_outs)
print(f"\nnoisy suite: {total} true crossings, {errors} miscounts", end=" ")
print(f"-> accuracy {hc.accuracy(total, errors).accuracy_percent}%")
