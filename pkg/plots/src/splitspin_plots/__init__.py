from .projection import orthographic_points, project_field
from .reading import (
    EmptyInput,
    SchemaError,
    field_params,
    read_field,
    read_rows,
    split_inputs,
)

__version__ = "0.1.0"
