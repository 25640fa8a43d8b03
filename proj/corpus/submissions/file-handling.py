def write_lines(path, lines):
    with open(path, "w") as f:
        for line in lines:
            f.write(line + "\n")


def read_lines(path):
    with open(path) as f:
        return [line.rstrip("\n") for line in f]


def append_line(path, line):
    with open(path, "a") as f:
        f.write(line + "\n")


notes = "notes.txt"
write_lines(notes, ["first entry", "second entry"])
append_line(notes, "third entry")
for line in read_lines(notes):
    print(line)
