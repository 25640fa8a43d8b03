def moving_average(prices, window):
    averages = []
    for i in range(len(prices) - window + 1):
        chunk = prices[i:i + window]
        averages.append(sum(chunk) / window)
    return averages


closing = [101.2, 103.5, 102.8, 105.1, 107.4, 106.9, 109.0, 111.3]
short = moving_average(closing, 3)
print("3-day moving average:", [round(v, 2) for v in short])
if short[-1] > short[0]:
    print("Trend: rising")
else:
    print("Trend: falling")
