from .examples import GalleryExample, available_examples, load_example
from .verify import CheckResult, VerificationReport, verify_example
