def is_palindrome(text):
    cleaned = ""
    for ch in text.lower():
        if ch.isalnum():
            cleaned += ch
    return cleaned == cleaned[::-1]


word = input("Enter a string: ")
if is_palindrome(word):
    print(word, "is a palindrome")
else:
    print(word, "is not a palindrome")
