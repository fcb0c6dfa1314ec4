data = open("/etc/passwd")
print_screen(data)
