principal = float(input("Principal: "))
rate = float(input("Annual rate (percent): "))
time = float(input("Time (years): "))

interest = principal * rate * time / 100
print("Simple interest:", interest)
print("Total amount:", principal + interest)
