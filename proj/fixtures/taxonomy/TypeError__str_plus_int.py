count = find_file_id("x")
print_screen("found " + count)
