"""Semi-Lagrangian adaptive-rank solvers for Vlasov-Poisson in hierarchical Tucker format"""

__version__ = "0.3.0"
