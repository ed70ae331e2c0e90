from pathlib import Path

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Limits(BaseModel):
    # brute-force permanent enumerates n! permutations
    permanent_max_n: int = Field(default=10, ge=0)


class Runtime(BaseModel):
    workers: int = Field(default=1, ge=1)

    chunk_size: int = Field(default=256, ge=1)

    log_file: Path = Path("tropabs.log")


class Config(BaseSettings):
    model_config = SettingsConfigDict(
        use_enum_values=True,
        env_nested_delimiter="__",
        env_prefix="TROPABS_",
        case_sensitive=False,
        # To use the default value for a field rather than an
        # empty value from the environment.
        env_ignore_empty=True,
    )

    limits: Limits = Limits()
    runtime: Runtime = Runtime()
