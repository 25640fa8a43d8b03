def list_sum(numbers):
    total = 0
    for n in numbers:
        total += n
    return total


values = [float(x) for x in input("Numbers separated by spaces: ").split()]
print("Sum:", list_sum(values))
