"""TeamRules: interpretable rule-set advice for human-AI decision-making teams.

TeamRules learns a small set of positive and negative rules that recommend a
label to a human decision maker. Training accounts for the human's own
decisions, a model of when the human accepts contradicting advice, and a
per-contradiction reconciliation cost, so the advice appears only where it is
expected to help the team.

The package includes:
- Dataset generation, CSV ingestion and predicate binarization
- Simulated humans with configurable accept/reject regions
- Discretion models (oracle, boosted stumps, logistic, coin)
- FP-Growth candidate mining and simulated-annealing search
- Baselines (decision-history-aware, accuracy-only, full-coverage)
- A seeded sweep harness with CSV results and summary tables
"""
