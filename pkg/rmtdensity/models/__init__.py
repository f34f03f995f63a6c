# Models Layer - Pydantic data models and schemas
