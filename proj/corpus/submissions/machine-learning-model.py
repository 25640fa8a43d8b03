def fit_line(xs, ys):
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    numerator = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    denominator = sum((x - mean_x) ** 2 for x in xs)
    slope = numerator / denominator
    intercept = mean_y - slope * mean_x
    return slope, intercept


def predict(slope, intercept, x):
    return slope * x + intercept


hours = [1, 2, 3, 4, 5, 6]
scores = [52, 55, 61, 64, 70, 74]
m, b = fit_line(hours, scores)
print("slope:", round(m, 3), "intercept:", round(b, 3))
print("predicted score for 7 hours:", round(predict(m, b, 7), 1))
