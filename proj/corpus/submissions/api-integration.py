import json
import urllib.request


def fetch_posts():
    url = "https://jsonplaceholder.typicode.com/posts"
    with urllib.request.urlopen(url) as response:
        data = json.loads(response.read().decode())
    return data


def save_posts(posts, path):
    with open(path, "w") as f:
        json.dump(posts, f, indent=2)


posts = fetch_posts()
for post in posts[:5]:
    print(post["userId"], "-", post["title"])
save_posts(posts, "posts.json")
