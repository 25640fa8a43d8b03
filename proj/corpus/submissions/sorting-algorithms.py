def bubble_sort(items):
    data = list(items)
    for i in range(len(data)):
        for j in range(len(data) - 1 - i):
            if data[j] > data[j + 1]:
                data[j], data[j + 1] = data[j + 1], data[j]
    return data


def quicksort(items):
    if len(items) <= 1:
        return list(items)
    pivot = items[0]
    smaller = [x for x in items[1:] if x < pivot]
    bigger = [x for x in items[1:] if x >= pivot]
    return quicksort(smaller) + [pivot] + quicksort(bigger)


numbers = [5, 2, 9, 1, 7, 3]
print("bubble:", bubble_sort(numbers))
print("quick: ", quicksort(numbers))
