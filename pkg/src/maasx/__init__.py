"""Manufacturing-as-a-Service dataspace: AAS submodels exchanged over MX-Port connectors."""

__version__ = "0.1.0"
