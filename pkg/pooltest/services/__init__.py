"""Service layer: cost formulas, oracles, optimizers and claim checks."""
