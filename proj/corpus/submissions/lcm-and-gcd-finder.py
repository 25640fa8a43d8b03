def gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def lcm(a, b):
    return a * b // gcd(a, b)


x = int(input("First number: "))
y = int(input("Second number: "))
print("GCD:", gcd(x, y))
print("LCM:", lcm(x, y))
