#!/usr/bin/env python3
"""Writes benchmarks/mini: small instances whose expected outputs come from
running the ground-truth SQL through Python's sqlite3."""

import csv
import json
import sqlite3
import sys
from pathlib import Path

SCHOOL = {
    "Grades": (["CourseID", "StudentID", "Grade"], [
        (10, 36933, "A"), (11, 36933, "B"), (12, 36933, "A"), (10, 37362, "A"), (12, 37362, "C"),
        (11, 37453, "A"), (10, 37510, "B"), (12, 37510, "A"), (10, 37955, "A")]),
    "Courses": (["CourseID", "CourseName"], [(10, "Programming"), (11, "Algorithms"), (12, "Databases")]),
    "Students": (["StudentID", "Name", "Year"], [
        (36933, "Ana", 2), (37362, "Rui", 1), (37453, "Eva", 3), (37510, "Ines", 1), (37955, "Tiago", 2)]),
}

COMPANY = {
    "Employees": (["EmpID", "Name", "DeptID", "Salary"], [
        (1, "Alice", 1, 3200), (2, "Bruno", 1, 2100), (3, "Carla", 2, 4100), (4, "Duarte", 3, 1900),
        (5, "Elsa", 2, 2800), (6, "Filipe", 3, 3500), (7, "Gil", 1, 1500)]),
    "Depts": (["DeptID", "DeptName", "City"], [(1, "Sales", "Lisbon"), (2, "R&D", "Porto"), (3, "Support", "Lisbon")]),
}

SHOP = {
    "Orders": (["OrderID", "CustID", "Item", "Qty", "Day"], [
        (100, 1, "pen", 3, "2021-01-15"), (101, 2, "ink", 1, "2021-02-02"), (102, 1, "ink", 2, "2021-03-09"),
        (103, 3, "pad", 5, "2021-03-20"), (104, 2, "pen", 4, "2021-04-01"), (105, 4, "pad", 2, "2021-04-11")]),
    "Customers": (["CustID", "CName", "Country"], [
        (1, "Rita", "Portugal"), (2, "Hugo", "Spain"), (3, "Lena", "Portugal"), (4, "Omar", "France")]),
}

LIBRARY = {
    "Books": (["BookID", "Title", "Year"], [
        (1, "Dune", 1965), (2, "Neuromancer", 1984), (3, "Anathem", 2008), (4, "Blindsight", 2006),
        (5, "Hyperion", 1989)]),
    "Loans": (["BookID", "MemberID"], [(1, 7), (3, 7), (3, 9), (5, 8), (1, 9)]),
}

# (id, tables, uses, constants, aggregators, ground truth, foreign keys)
INSTANCES = [
    ("grades_per_course", SCHOOL, ["Grades", "Courses"], [], ["count"],
     "SELECT CourseName, count(*) AS GradeCount FROM Grades NATURAL JOIN Courses GROUP BY CourseName",
     ["Grades.CourseID->Courses.CourseID"]),
    ("distinct_students_per_course", SCHOOL, ["Grades"], [], ["count"],
     "SELECT CourseID, count(DISTINCT StudentID) AS n FROM Grades GROUP BY CourseID", []),
    ("payroll_per_dept", COMPANY, ["Employees", "Depts"], [], ["sum"],
     "SELECT DeptName, sum(Salary) AS payroll FROM Employees NATURAL JOIN Depts GROUP BY DeptName",
     ["Employees.DeptID->Depts.DeptID"]),
    ("min_salary_per_city", COMPANY, ["Employees", "Depts"], [], ["min"],
     "SELECT City, min(Salary) AS low FROM Employees NATURAL JOIN Depts GROUP BY City",
     ["Employees.DeptID->Depts.DeptID"]),
    ("well_paid_per_dept", COMPANY, ["Employees"], [2000], ["count"],
     "SELECT DeptID, count(*) AS n FROM Employees WHERE Salary > 2000 GROUP BY DeptID", []),
    ("mean_qty_per_item", SHOP, ["Orders"], [], ["avg"],
     "SELECT Item, avg(Qty) AS q FROM Orders GROUP BY Item", []),
    ("portuguese_orders", SHOP, ["Orders", "Customers"], ["Portugal"], [],
     "SELECT OrderID FROM Orders NATURAL JOIN Customers WHERE Country = 'Portugal'",
     ["Orders.CustID->Customers.CustID"]),
    ("qty_per_customer", SHOP, ["Orders", "Customers"], [], ["sum"],
     "SELECT CName, sum(Qty) AS total FROM Orders NATURAL JOIN Customers GROUP BY CName",
     ["Orders.CustID->Customers.CustID"]),
    ("spring_orders", SHOP, ["Orders"], ["2021-03-01"], [],
     "SELECT OrderID FROM Orders WHERE Day >= '2021-03-01'", []),
    ("never_loaned", LIBRARY, ["Books", "Loans"], [], [],
     "SELECT BookID, Title, Year FROM Books WHERE BookID NOT IN (SELECT BookID FROM Loans)",
     ["Loans.BookID->Books.BookID"]),
    ("loaned_titles", LIBRARY, ["Books", "Loans"], [], [],
     "SELECT BookID, Title, Year FROM Books WHERE BookID IN (SELECT BookID FROM Loans)",
     ["Loans.BookID->Books.BookID"]),
    ("loans_per_title", LIBRARY, ["Books", "Loans"], [], ["count"],
     "SELECT Title, count(*) AS n FROM Books NATURAL JOIN Loans GROUP BY Title",
     ["Loans.BookID->Books.BookID"]),
    ("well_paid_per_city", COMPANY, ["Employees", "Depts"], [2000], ["count"],
     "SELECT City, count(*) AS n FROM Employees NATURAL JOIN Depts WHERE Salary > 2000 GROUP BY City",
     ["Employees.DeptID->Depts.DeptID"]),
    ("pen_qty_per_country", SHOP, ["Orders", "Customers"], ["pen"], ["sum"],
     "SELECT Country, sum(Qty) AS total FROM Orders NATURAL JOIN Customers WHERE Item = 'pen' GROUP BY Country",
     ["Orders.CustID->Customers.CustID"]),
    ("a_count_per_student", SCHOOL, ["Grades", "Students"], ["A"], ["count"],
     "SELECT Name, count(*) AS n FROM Grades NATURAL JOIN Students WHERE Grade = 'A' GROUP BY Name",
     ["Grades.StudentID->Students.StudentID"]),
    ("lisbon_mean_salary", COMPANY, ["Employees", "Depts"], ["Lisbon"], ["avg"],
     "SELECT DeptName, avg(Salary) AS mean FROM Employees NATURAL JOIN Depts WHERE City = 'Lisbon' GROUP BY DeptName",
     ["Employees.DeptID->Depts.DeptID"]),
    ("customers_without_winter_orders", SHOP, ["Orders", "Customers"], ["2021-03-01"], [],
     "SELECT CustID, CName, Country FROM Customers WHERE CustID NOT IN (SELECT CustID FROM Orders WHERE Day < '2021-03-01')",
     ["Orders.CustID->Customers.CustID"]),
    ("databases_a_students", SCHOOL, ["Grades", "Courses", "Students"], ["A", "Databases"], [],
     "SELECT Name FROM Grades NATURAL JOIN Courses NATURAL JOIN Students WHERE Grade = 'A' AND CourseName = 'Databases'",
     ["Grades.CourseID->Courses.CourseID", "Grades.StudentID->Students.StudentID"]),
    ("recent_loans_per_member", LIBRARY, ["Books", "Loans"], [2000], ["count"],
     "SELECT MemberID, count(*) AS n FROM Books NATURAL JOIN Loans WHERE Year > 2000 GROUP BY MemberID",
     ["Loans.BookID->Books.BookID"]),
    ("max_grade_year", SCHOOL, ["Grades", "Students"], [11], ["max"],
     "SELECT CourseID, max(Year) AS top FROM Grades NATURAL JOIN Students WHERE CourseID <> 11 GROUP BY CourseID",
     ["Grades.StudentID->Students.StudentID"]),
]


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main(out_dir):
    out_dir = Path(out_dir)
    for iid, tables, uses, constants, aggregators, truth, fks in INSTANCES:
        d = out_dir / iid
        d.mkdir(parents=True, exist_ok=True)
        db = sqlite3.connect(":memory:")
        for name in uses:
            header, rows = tables[name]
            db.execute(f"CREATE TABLE {name} ({', '.join(header)})")
            db.executemany(f"INSERT INTO {name} VALUES ({', '.join('?' * len(header))})", rows)
            write_csv(d / f"{name}.csv", header, rows)
        cur = db.execute(truth)
        write_csv(d / "expected.csv", [c[0] for c in cur.description], cur.fetchall())
        manifest = {
            "id": iid,
            "inputs": [{"name": n, "path": f"{n}.csv"} for n in uses],
            "output": "expected.csv",
            "constants": constants,
            "aggregators": aggregators,
            "foreign_keys": [
                {"from": a, "to": b} for a, b in (fk.split("->") for fk in fks)
            ],
            "ground_truth": truth,
        }
        (d / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "benchmarks/mini")
