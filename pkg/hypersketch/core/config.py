import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Optional

from dotenv import dotenv_values
from pydantic import (
    BaseModel, BeforeValidator, ConfigDict, PlainSerializer, field_validator, model_validator,
)
from pydantic_settings import BaseSettings, SettingsConfigDict

from hypersketch.core.prf import SEED_BYTES, Prf
from hypersketch.services.sparsify.parameters import ceil_log2, log_n, set_error_parameter

# Mersenne prime for all modular fingerprints.
FIELD_PRIME = (1 << 61) - 1


def parse_rational(value: Any) -> Fraction:
    """Accept Fraction, int, "1/2", "0.5" or a float (via its decimal repr)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("boolean is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational number: {value!r}") from e
    raise ValueError(f"not a rational number: {value!r}")


Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(lambda f: str(f), return_type=str),
]


class SketchConfig(BaseModel):
    """Public sketch parameters. Everything except the master seed."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    m_max: int
    r_max: int
    eps: Rational = Fraction(1, 2)
    strength_c: int = 2
    c_rep: int = 2
    c_conn: int = 4
    c_l0: int = 4
    delta: Optional[Rational] = None
    max_repetitions: int = 24
    tail_sparsity: int = 4
    oracle_vertex_cap: int = 12
    two_cut_cap: int = 20
    sparse_recovery_cap: int = 8
    preprocessing_offset: Optional[int] = None
    max_preprocessing_offset: int = 2
    size_bound_c: int = 8
    kappa_override: Optional[Rational] = None

    @model_validator(mode="after")
    def check_ranges(self) -> "SketchConfig":
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if self.m_max < 1:
            raise ValueError(f"m_max must be positive, got {self.m_max}")
        if not 2 <= self.r_max <= self.n:
            raise ValueError(f"r_max must lie in [2, n], got {self.r_max}")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.delta is not None and not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        for name in ("strength_c", "c_rep", "c_conn", "c_l0", "max_repetitions", "size_bound_c"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.tail_sparsity <= self.sparse_recovery_cap:
            raise ValueError(
                f"tail_sparsity must lie in [0, {self.sparse_recovery_cap}], got {self.tail_sparsity}"
            )
        if self.preprocessing_offset is not None and self.preprocessing_offset < 0:
            raise ValueError("preprocessing_offset must be non-negative")
        if self.kappa_override is not None and self.kappa_override <= 0:
            raise ValueError(f"kappa_override must be positive, got {self.kappa_override}")
        return self

    # ─── Stage layout ───

    @property
    def log_n(self) -> int:
        return log_n(self.n)

    @property
    def stages(self) -> int:
        """L = floor(log2(m_max)) + 1."""
        return self.m_max.bit_length()

    @property
    def fingerprint_levels(self) -> int:
        """Levels 0..log n."""
        return self.log_n + 1

    @property
    def rates(self) -> int:
        """Rate indices q = 0..log n, fingerprint rate 2^-q."""
        return self.log_n + 1

    # ─── Error parameter and thresholds ───

    @property
    def eps_star(self) -> Fraction:
        return set_error_parameter(self.eps, self.n)

    @property
    def phi(self) -> Fraction:
        return Fraction(self.strength_c * self.log_n) / (self.eps_star ** 2)

    @property
    def kappa(self) -> Fraction:
        if self.kappa_override is not None:
            return self.kappa_override
        return 100 * self.phi

    @property
    def recovery_phi(self) -> Fraction:
        """phi handed to conditional recovery; keeps kappa < phi * log n for every n."""
        return 2 * self.kappa

    def saturation_threshold(self, phi: Fraction) -> int:
        return max(1, math.ceil(Fraction(phi) * self.log_n))

    @property
    def recovery_repetitions(self) -> int:
        wanted = math.ceil(self.c_rep * self.recovery_phi * self.log_n)
        return max(1, min(self.max_repetitions, wanted))

    # ─── l0 samplers ───

    @property
    def l0_delta(self) -> Fraction:
        return self.delta if self.delta is not None else Fraction(1, self.n ** 3)

    @property
    def l0_repetitions(self) -> int:
        return max(1, math.ceil(self.c_l0 * math.log(1 / float(self.l0_delta))))

    @staticmethod
    def l0_levels(support_bound: int) -> int:
        return max(1, int(support_bound).bit_length())

    @property
    def sampler_levels(self) -> int:
        return self.l0_levels(self.m_max)

    # ─── Connectivity preprocessing ───

    @property
    def connectivity_rounds(self) -> int:
        return self.c_conn * self.log_n

    @property
    def connectivity_levels(self) -> int:
        return self.l0_levels(self.n ** 5)

    @property
    def effective_offset(self) -> int:
        if self.preprocessing_offset is not None:
            return self.preprocessing_offset
        return ceil_log2(Fraction(self.n ** 20) / (self.eps_star ** 2))

    @property
    def connectivity_stages(self) -> int:
        return self.stages + min(self.effective_offset, self.max_preprocessing_offset)

    # ─── Tail sketches ───

    @property
    def tail_enabled(self) -> bool:
        # edge ids double as field points
        return self.tail_sparsity > 0 and (1 << self.n) < FIELD_PRIME

    @property
    def size_bound(self) -> int:
        return math.ceil(self.size_bound_c * self.n * self.log_n / (self.eps_star ** 2))

    # ─── Identity ───

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> bytes:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).digest()

    @classmethod
    def from_json(cls, text: str) -> "SketchConfig":
        return cls.model_validate(json.loads(text))


class Settings(BaseSettings):
    """Process-level settings: environment, `.env`, or an explicit config file."""

    model_config = SettingsConfigDict(case_sensitive=True, env_file=".env", extra="ignore")

    PROJECT_NAME: str = "hypersketch"
    LOG_LEVEL: str = "INFO"

    # Sketch shape
    N_VERTICES: int = 8
    M_MAX: int = 256
    R_MAX: int = 4
    EPSILON: str = "1/2"

    # Constants
    STRENGTH_C: int = 2
    C_REP: int = 2
    C_CONN: int = 4
    C_L0: int = 4
    DELTA: Optional[str] = None
    MAX_REPETITIONS: int = 24
    TAIL_SPARSITY: int = 4
    SIZE_BOUND_C: int = 8
    KAPPA: Optional[str] = None

    # Oracle limits
    ORACLE_VERTEX_CAP: int = 12
    TWO_CUT_CAP: int = 20
    SPARSE_RECOVERY_CAP: int = 8

    # Preprocessing
    PREPROCESSING_OFFSET: Optional[int] = None
    MAX_PREPROCESSING_OFFSET: int = 2

    # Randomness and MPC
    MASTER_SEED: str = "00" * SEED_BYTES
    MEMORY_BUDGET: int = 1 << 28

    @field_validator("EPSILON", "DELTA", "KAPPA", mode="before")
    @classmethod
    def normalize_rational(cls, v: Any) -> Optional[str]:
        if v is None or (isinstance(v, str) and not v.strip()):
            return None
        return str(parse_rational(v))

    @field_validator("MASTER_SEED", mode="before")
    @classmethod
    def normalize_seed(cls, v: Any) -> str:
        text = str(v).strip().lower()
        if text.startswith("0x"):
            text = text[2:]
        if len(text) > 2 * SEED_BYTES:
            raise ValueError(f"MASTER_SEED longer than {SEED_BYTES} bytes")
        try:
            int(text or "0", 16)
        except ValueError as e:
            raise ValueError(f"MASTER_SEED is not hex: {v!r}") from e
        return text.rjust(2 * SEED_BYTES, "0")

    @field_validator("PREPROCESSING_OFFSET", mode="before")
    @classmethod
    def empty_offset(cls, v: Any) -> Any:
        if isinstance(v, str) and not v.strip():
            return None
        return v

    @property
    def master_seed(self) -> bytes:
        return bytes.fromhex(self.MASTER_SEED)

    def prf(self) -> Prf:
        return Prf(self.master_seed)

    def sketch_config(self, **overrides: Any) -> SketchConfig:
        values = {
            "n": self.N_VERTICES,
            "m_max": self.M_MAX,
            "r_max": self.R_MAX,
            "eps": self.EPSILON,
            "strength_c": self.STRENGTH_C,
            "c_rep": self.C_REP,
            "c_conn": self.C_CONN,
            "c_l0": self.C_L0,
            "delta": self.DELTA,
            "max_repetitions": self.MAX_REPETITIONS,
            "tail_sparsity": self.TAIL_SPARSITY,
            "oracle_vertex_cap": self.ORACLE_VERTEX_CAP,
            "two_cut_cap": self.TWO_CUT_CAP,
            "sparse_recovery_cap": self.SPARSE_RECOVERY_CAP,
            "preprocessing_offset": self.PREPROCESSING_OFFSET,
            "max_preprocessing_offset": self.MAX_PREPROCESSING_OFFSET,
            "size_bound_c": self.SIZE_BOUND_C,
            "kappa_override": self.KAPPA,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return SketchConfig(**values)


def load_settings(config_file: Optional[str] = None, **overrides: Any) -> Settings:
    """Settings from environment, then an optional env-style file, then overrides (last wins)."""
    values: dict = {}
    if config_file:
        if not Path(config_file).is_file():
            raise FileNotFoundError(f"config file not found: {config_file}")
        values.update({k: v for k, v in dotenv_values(config_file).items() if v is not None})
    values.update({k: v for k, v in overrides.items() if v is not None})
    return Settings(**values)


settings = Settings()
