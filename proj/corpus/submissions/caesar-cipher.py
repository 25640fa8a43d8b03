def shift_char(ch, shift):
    if ch.isupper():
        return chr((ord(ch) - ord("A") + shift) % 26 + ord("A"))
    if ch.islower():
        return chr((ord(ch) - ord("a") + shift) % 26 + ord("a"))
    return ch


def encrypt(message, shift):
    return "".join(shift_char(c, shift) for c in message)


def decrypt(message, shift):
    return encrypt(message, -shift)


text = input("Message: ")
key = int(input("Shift: "))
secret = encrypt(text, key)
print("Encrypted:", secret)
print("Decrypted:", decrypt(secret, key))
