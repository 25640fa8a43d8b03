import sqlite3

connection = sqlite3.connect("students.db")
cursor = connection.cursor()
cursor.execute(
    "CREATE TABLE IF NOT EXISTS students (id INTEGER PRIMARY KEY, name TEXT, grade REAL)"
)


def create(name, grade):
    cursor.execute("INSERT INTO students (name, grade) VALUES (?, ?)", (name, grade))
    connection.commit()


def read_all():
    cursor.execute("SELECT id, name, grade FROM students")
    return cursor.fetchall()


def update(student_id, grade):
    cursor.execute("UPDATE students SET grade = ? WHERE id = ?", (grade, student_id))
    connection.commit()


def delete(student_id):
    cursor.execute("DELETE FROM students WHERE id = ?", (student_id,))
    connection.commit()


create("Ada", 9.5)
create("Grace", 8.0)
update(2, 8.5)
delete(1)
print(read_all())
connection.close()
