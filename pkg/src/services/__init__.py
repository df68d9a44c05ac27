"""Services: tensor engine, data pipeline, model, objective, metrics, harness."""
