# CLI Layer - Command handlers and deterministic dataset writers
