# api/__init__.py

# HTTP service package; serve with `uvicorn api.main:app`.
