from .builders import (OrderDraft, OrderLine, QualityRequirement, QualityResult,
                       build_capability_description, build_digital_nameplate,
                       build_handover_documentation, build_machine_technical_data,
                       build_purchase_order, build_quality_report, build_technical_data,
                       cam_plan_elements, parse_capability_description,
                       parse_machine_technical_data, parse_purchase_order, parse_quality_report,
                       parse_technical_data, purchase_order_status, with_feature_costs,
                       with_order_status)
from .catalog import (CAPABILITY_DESCRIPTION, CATALOG, DIGITAL_NAMEPLATE, HANDOVER_DOCUMENTATION,
                      ORDER_STATES, PURCHASE_ORDER, QUALITY_CONTROL, TECHNICAL_DATA, TemplateId,
                      ValidationReport, Violation, catalog_document, export_catalog, template_for,
                      validate, validate_any)
