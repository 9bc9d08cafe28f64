"""Memory-network video object segmentation at desk scale."""
