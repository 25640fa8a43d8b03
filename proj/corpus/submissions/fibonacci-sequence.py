def fibonacci_up_to(limit):
    sequence = []
    a, b = 0, 1
    while a <= limit:
        sequence.append(a)
        a, b = b, a + b
    return sequence


n = int(input("Generate Fibonacci numbers up to: "))
print(fibonacci_up_to(n))
