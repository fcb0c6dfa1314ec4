for name in ["a", "b"]:
    count = count + 1
