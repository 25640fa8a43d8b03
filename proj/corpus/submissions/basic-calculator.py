def calculate(a, op, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError("unsupported operator " + op)


x = float(input("First number: "))
operator = input("Operator (+ - * /): ")
y = float(input("Second number: "))
print("Result:", calculate(x, operator, y))
