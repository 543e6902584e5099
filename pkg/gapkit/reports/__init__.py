from gapkit.reports.emit import (
    SCHEMA,
    ReportEnvelope,
    build_envelope,
    emit_report,
    parse_report,
    render_report,
    report_schema,
    to_jsonable,
    write_decay_csv,
    write_scan_csv,
)
from gapkit.reports.store import ReportStore
