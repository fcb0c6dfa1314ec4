print_screen(shell("ls ~"))
