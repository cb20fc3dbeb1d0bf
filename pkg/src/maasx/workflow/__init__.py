"""Party services, RFQ/Offer/Order state machines and the scenario driver."""

from .scenarios import (PULL, PUSH, Deployment, Operator, connect_http, deploy_in_process,
                        run_e2e, run_scenario_1, run_scenario_2, run_scenario_3, submodel_files,
                        tree_digest, write_output)
from .services import (DEFAULT_RULES, BuyerService, PartyService, PlatformService, SupplierService,
                       build_service, default_rules)
from .states import (OFFER_TRANSITIONS, ORDER_TRANSITIONS, RFQ_TRANSITIONS, Offer, Order, RfqRecord,
                     transition)
