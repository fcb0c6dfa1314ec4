import os
print_screen(shell("ls ~"))
