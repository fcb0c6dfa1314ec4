show = lambda text: print_screen(text)
show("hi")
