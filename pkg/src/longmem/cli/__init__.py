from .config import AnalysisConfig, build_config
from .ingest import ColumnMapping, ingest_csv
from .pipeline import ReportBundle, StageError, analyze, run_analysis
