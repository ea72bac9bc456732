"""gaitstage - Parkinsonian gait severity staging from ground reaction force records."""

__version__ = "0.1.0"
