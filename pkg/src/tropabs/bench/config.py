from typing import Self

from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


def parse_dims(text: str) -> list[int]:
    """``"3..15"`` (inclusive) or ``"3,5,8"``."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            start, stop = int(lo), int(hi)
        except ValueError:
            raise ValueError(f"Bad dimension range '{text}', expected e.g. 3..15") from None
        if start > stop:
            raise ValueError(f"Empty dimension range '{text}'")
        return list(range(start, stop + 1))
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"Bad dimension list '{text}', expected e.g. 3,5,8") from None


class BenchConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="TROPABS_BENCH_",
        case_sensitive=False,
        # To use the default value for a field rather than an
        # empty value from the environment.
        env_ignore_empty=True,
    )

    dims: list[int] = [3, 4, 5, 6, 7, 8]
    trials: int = Field(default=10, ge=1)
    finite_per_row: int = Field(default=2, ge=1)
    value_range: tuple[int, int] = (1, 100)
    seed: int = Field(default=0, ge=0, lt=2**64)
    horizon: int = Field(default=10, ge=1)

    forward_box: tuple[float, float] = (0, 1)
    backward_box: tuple[float, float] = (90, 100)

    # also time the lifting construction on the image phase
    scaling: bool = False

    @field_validator("dims")
    @classmethod
    def positive_dims(cls, v: list[int]) -> list[int]:
        if not v or any(n < 1 for n in v):
            raise ValueError("dims must be a non-empty list of positive sizes")
        return sorted(set(v))

    @model_validator(mode="after")
    def ordered_ranges(self) -> Self:
        for name in ("value_range", "forward_box", "backward_box"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} has lo > hi: {lo} > {hi}")
        return self
