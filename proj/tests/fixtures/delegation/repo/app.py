def tokenize(text):
    return text.split()


def normalize(words):
    return [w.lower() for w in words]


def read_input(path):
    with open(path) as f:
        return f.read()


def write_output(path, words):
    with open(path, "w") as f:
        f.write("\n".join(normalize(words)))
