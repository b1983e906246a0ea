# %% [markdown]
# # Config-driven runs
#
# The same probes behind `proxgeneric run`, called from Python. Records are
# one JSON object per probe; identical config and seed give identical bytes.

# %%
from proxgeneric.experiments import all_passed, run_config, to_csv, to_jsonl

cfg = {
    "functions": [{"id": "zero", "type": "zero", "dim": 1},
                  {"id": "abs", "type": "abs_sum", "dim": 1}],
    "experiment": ["dynamics", "checks"],
    "parameters": {"samples": 2000, "cycles": 300},
}
records = run_config(cfg, seed=1)
print(to_csv(records))
print(to_jsonl(records[:1]))
print("all passed:", all_passed(records))
