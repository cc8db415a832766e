import pytest

from clarify.schema import Boolean, Finite, NumericRange, ParamSpec, Text, Toolkit, ToolSchema


def office_toolkit() -> Toolkit:
    """Small hand-made toolkit used across unit tests."""
    return Toolkit(
        (
            ToolSchema(
                "convert",
                (
                    ParamSpec("format", Finite(("pptx", "doc", "png", "jpeg", "tiff"))),
                    ParamSpec("output_filename", Text()),
                    ParamSpec("zip", Boolean(), required=False),
                ),
            ),
            ToolSchema(
                "delete_page",
                (
                    ParamSpec("page_num", NumericRange(1, 10, integer=True)),
                    ParamSpec("overwrite", Boolean()),
                    ParamSpec("output_pathname", Text(), required=False, has_default=True),
                ),
            ),
            ToolSchema(
                "pick",
                (
                    ParamSpec("a", Finite(("x", "y"))),
                    ParamSpec("b", Finite(("p", "q", "r", "s"))),
                ),
            ),
        )
    )


@pytest.fixture
def toolkit():
    return office_toolkit()
