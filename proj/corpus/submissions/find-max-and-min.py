def find_extremes(numbers):
    largest = numbers[0]
    smallest = numbers[0]
    for n in numbers[1:]:
        if n > largest:
            largest = n
        if n < smallest:
            smallest = n
    return largest, smallest


data = [int(x) for x in input("Numbers: ").split()]
big, small = find_extremes(data)
print("Max:", big, "Min:", small)
