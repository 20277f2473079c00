# Output rendering (text and JSON)
