if len(files) == 0:
    files = shell("ls ~")
print_screen(files)
