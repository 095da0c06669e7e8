"""Configuration: experiment schema, lab settings and config-to-object builders."""
