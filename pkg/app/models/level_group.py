from typing import List

from pydantic import BaseModel, Field


class LevelGroup(BaseModel):
    """Permutation group induced on the level-n vertices"""
    level: int = Field(ge=0)
    degree: int = Field(ge=1, description="Number of level vertices, d**level")
    base: List[int] = Field(default_factory=list, description="Stabilizer chain base points")
    orbit_lengths: List[int] = Field(default_factory=list, description="Basic orbit length per base point")
    strong_generator_count: int = 0
    order: int = Field(ge=1)

    @property
    def exponent(self) -> int:
        """log2 of the order when it is a power of two, else -1"""
        if self.order & (self.order - 1):
            return -1
        return self.order.bit_length() - 1
