"""Script to summarise persisted experiment trials and attack transcripts."""

import argparse
import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import pandas as pd
from sqlalchemy import func

from src.database.models import AttackTranscript, ExperimentRow, ExperimentRun, ExperimentTrial
from src.database.session import SessionLocal, init_db


def summarise_trials(db, run_id=None) -> pd.DataFrame:
    """Max and mean of max|e| per discriminant, recomputed from the trial rows."""
    query = db.query(
        ExperimentTrial.run_id,
        ExperimentTrial.delta,
        func.count(ExperimentTrial.id).label("trials"),
        func.max(ExperimentTrial.max_abs).label("max_coefficient"),
        func.avg(ExperimentTrial.max_abs).label("mean_max"),
        func.max(ExperimentTrial.raw_max_abs).label("raw_max_coefficient"),
    ).group_by(ExperimentTrial.run_id, ExperimentTrial.delta)
    if run_id:
        query = query.filter(ExperimentTrial.run_id == run_id)
    frame = pd.DataFrame(query.all(), columns=["run_id", "delta", "trials", "max_coefficient",
                                               "mean_max", "raw_max_coefficient"])
    bounds = pd.DataFrame(db.query(ExperimentRow.run_id, ExperimentRow.delta, ExperimentRow.exponent_bound).all(),
                          columns=["run_id", "delta", "exponent_bound"])
    if frame.empty:
        return frame
    frame = frame.merge(bounds, on=["run_id", "delta"], how="left")
    frame["within_bound"] = frame["max_coefficient"] <= frame["exponent_bound"]
    return frame


def summarise_attacks(db) -> pd.DataFrame:
    query = db.query(
        AttackTranscript.p,
        AttackTranscript.solver,
        func.count(AttackTranscript.id).label("keys"),
        func.sum(AttackTranscript.recovered).label("recovered"),
        func.sum(AttackTranscript.first_attempt).label("first_attempt"),
        func.avg(AttackTranscript.queries).label("mean_queries"),
    ).group_by(AttackTranscript.p, AttackTranscript.solver)
    return pd.DataFrame(query.all(), columns=["p", "solver", "keys", "recovered", "first_attempt", "mean_queries"])


def verify(run_id=None) -> int:
    """Print summaries; non-zero if a stored row exceeded its bound."""
    init_db()
    db = SessionLocal()
    try:
        runs = db.query(func.count(ExperimentRun.id)).scalar()
        print(f"Experiment runs in database: {runs}")
        trials = summarise_trials(db, run_id)
        if trials.empty:
            print("No experiment trials found. Run: python -m src.main table2")
        else:
            print(trials.to_string(index=False))
        attacks = summarise_attacks(db)
        if not attacks.empty:
            print("\nAttack transcripts:")
            print(attacks.to_string(index=False))
        return 0 if trials.empty or bool(trials["within_bound"].all()) else 1
    finally:
        db.close()


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Summarise persisted trials")
    parser.add_argument("--run-id", help="Restrict to one experiment run")
    args = parser.parse_args()
    sys.exit(verify(args.run_id))
