def celsius_to_fahrenheit(c):
    return c * 9 / 5 + 32


def celsius_to_kelvin(c):
    return c + 273.15


def fahrenheit_to_celsius(f):
    return (f - 32) * 5 / 9


def kelvin_to_celsius(k):
    return k - 273.15


print("1: C->F  2: C->K  3: F->C  4: K->C")
choice = input("Choose a conversion: ")
value = float(input("Temperature value: "))
if choice == "1":
    print(celsius_to_fahrenheit(value))
elif choice == "2":
    print(celsius_to_kelvin(value))
elif choice == "3":
    print(fahrenheit_to_celsius(value))
elif choice == "4":
    print(kelvin_to_celsius(value))
else:
    print("Unknown choice")
