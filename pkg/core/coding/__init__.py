"""Random codebooks, the likelihood encoder and the decoders."""
