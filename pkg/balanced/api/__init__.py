"""HTTP routes for commands, graphs and groups."""
