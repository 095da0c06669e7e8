"""Rate-distortion solvers: point-to-point, Wyner-Ziv and Berger-Tung."""
