def word_frequencies(path):
    counts = {}
    with open(path) as f:
        for line in f:
            for word in line.lower().split():
                word = word.strip(".,!?;:\"'")
                if word:
                    counts[word] = counts.get(word, 0) + 1
    return counts


filename = input("Text file: ")
for word, count in sorted(word_frequencies(filename).items()):
    print(word, count)
