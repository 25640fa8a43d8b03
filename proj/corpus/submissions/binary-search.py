def binary_search(items, target):
    low = 0
    high = len(items) - 1
    while low <= high:
        mid = (low + high) // 2
        if items[mid] == target:
            return mid
        if items[mid] < target:
            low = mid + 1
        else:
            high = mid - 1
    return -1


sorted_list = [1, 3, 5, 7, 9, 11]
print(binary_search(sorted_list, 7))
print(binary_search(sorted_list, 4))
