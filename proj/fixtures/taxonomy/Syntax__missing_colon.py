if True
    print_screen("missing colon")
