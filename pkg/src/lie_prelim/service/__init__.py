"""FastAPI service layer: pydantic schemas and the application."""
