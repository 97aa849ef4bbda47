# Core configuration package __init__.py
