try:
    print_screen("x")
except Exception:
    pass
