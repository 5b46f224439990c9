"""Group arithmetic, graph algorithms, labeling engines and the brute-force oracle."""
