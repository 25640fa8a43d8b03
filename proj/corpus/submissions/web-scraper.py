import re
import urllib.request


def fetch(url):
    with urllib.request.urlopen(url) as response:
        return response.read().decode("utf-8")


def extract_titles(html):
    return re.findall(r"<h2[^>]*>(.*?)</h2>", html)


page = fetch("http://example.com/articles")
for title in extract_titles(page):
    print(title.strip())
