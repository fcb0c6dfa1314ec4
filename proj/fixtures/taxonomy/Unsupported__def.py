def list_files():
    return shell("ls ~")

print_screen(list_files())
