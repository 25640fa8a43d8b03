def hanoi(disks, source, spare, target):
    if disks == 1:
        print("move disk 1 from", source, "to", target)
        return
    hanoi(disks - 1, source, target, spare)
    print("move disk", disks, "from", source, "to", target)
    hanoi(disks - 1, spare, source, target)


count = int(input("Number of disks: "))
hanoi(count, "A", "B", "C")
