def knapsack(weights, values, capacity):
    n = len(weights)
    table = [[0] * (capacity + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        for w in range(capacity + 1):
            table[i][w] = table[i - 1][w]
            if weights[i - 1] <= w:
                candidate = table[i - 1][w - weights[i - 1]] + values[i - 1]
                if candidate > table[i][w]:
                    table[i][w] = candidate
    return table[n][capacity]


item_weights = [1, 3, 4, 5]
item_values = [1, 4, 5, 7]
print("Best value:", knapsack(item_weights, item_values, 7))
