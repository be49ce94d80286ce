"""Content values produced by content sources."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

ContentKind = Literal["text", "image", "tupled"]
Flavour = Literal["neutral", "odd", "cute", "vintage", "inspirational", "chart", "gif"]
MediaKind = Literal["still", "animated"]

CONTENT_KINDS: tuple[str, ...] = ("text", "image", "tupled")
FLAVOURS: tuple[str, ...] = ("neutral", "odd", "cute", "vintage", "inspirational", "chart", "gif")


class ImageAsset(BaseModel):
    """An image picked by an image source.

    `asset_id` is keyed on the canonical locator, never on fetch order, so the
    same underlying file has the same identity in every run.
    """

    model_config = ConfigDict(frozen=True, str_strip_whitespace=True)

    asset_id: str = Field(..., min_length=1, description="Source name + canonical locator")
    locator: str = Field(..., min_length=1, description="URL or corpus-relative path")
    media_kind: MediaKind = "still"
    attribution: str = ""
    source_name: str = ""
    related_to_seed: bool = False


class TextContent(BaseModel):
    """A text item picked or generated by a text source."""

    model_config = ConfigDict(frozen=True, str_strip_whitespace=True)

    text: str = Field(..., min_length=1)
    source_name: str = ""
    related_to_seed: bool = False
    attribution: Optional[str] = None

    def render(self) -> str:
        """Text as placed on a slide (quotes carry their author)."""
        if self.attribution:
            return f"“{self.text}” — {self.attribution}"
        return self.text
