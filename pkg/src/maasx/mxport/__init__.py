"""MX-Port connector: gate, access control, negotiation, discovery and transports."""

from .access import ACTIONS, AccessControl, AccessRule, Decision, Resource
from .consumer import HERCULES, LEO, DataSpaceConsumer, remote_error
from .gate import DTR_DATASET, Client, Gate, Request, Response, json_response
from .layers import LayerStack, identity
from .negotiation import (AGREED, EVENTS, FINALIZED, OFFERED, REQUESTED, STATES, TERMINATED,
                          TRANSITIONS, ContractNegotiation, Dataset, NegotiationManager)
from .server import make_server, serve_in_thread
from .tokens import ROLES, AccessToken, sign, verify
from .transport import HttpNetwork, InProcessNetwork, NetworkClient, Trace, split_url
