print_screen("unbalanced"
