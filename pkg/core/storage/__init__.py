"""Result files and shipped fixtures."""
