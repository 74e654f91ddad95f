"""Expected testing cost and optimal group size for pooled testing schemes."""
