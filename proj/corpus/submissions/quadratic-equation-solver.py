import math

a = float(input("a: "))
b = float(input("b: "))
c = float(input("c: "))

discriminant = b * b - 4 * a * c
if discriminant > 0:
    r1 = (-b + math.sqrt(discriminant)) / (2 * a)
    r2 = (-b - math.sqrt(discriminant)) / (2 * a)
    print("Two roots:", r1, r2)
elif discriminant == 0:
    print("One root:", -b / (2 * a))
else:
    print("No real roots")
