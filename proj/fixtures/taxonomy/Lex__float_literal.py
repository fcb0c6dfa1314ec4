x = 1.5
print_screen(str(x))
