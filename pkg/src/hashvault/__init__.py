"""hashvault: a password-storage and password-cracking laboratory.

Defender side: a credential vault with plaintext/sha1/salted-sha1/bcrypt/
mfcrypt schemes, migration, and breach-dump export.  Attacker side: rainbow
tables, dictionary attacks, and a measurement harness for cost scaling,
salt blowup, and throughput.  Hot kernels run in a compiled extension when
available, with a bit-identical pure-Python fallback.
"""

from .backend import BACKEND, available_backends

__version__ = "0.1.0"

__all__ = ["BACKEND", "available_backends", "__version__"]
