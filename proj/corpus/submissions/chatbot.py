responses = {
    "hello": "Hi there! How can I help you today?",
    "hours": "We are open 9am to 5pm, Monday to Friday.",
    "price": "Our basic plan starts at $10 per month.",
    "bye": "Goodbye! Have a great day.",
}


def reply(message):
    lowered = message.lower()
    for keyword, answer in responses.items():
        if keyword in lowered:
            return answer
    return "Sorry, I did not understand that."


while True:
    user = input("You: ")
    if user.lower() == "quit":
        break
    print("Bot:", reply(user))
