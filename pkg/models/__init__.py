# Models package
# Pydantic domain models shared by every stage
