import csv

from inventory.models import Item, Warehouse


def parse_row(row):
    return Item(row["sku"], row["name"], int(row["quantity"]), float(row["price"]))


def load_csv(path):
    warehouse = Warehouse()
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            warehouse.add(parse_row(row))
    return warehouse


def save_csv(warehouse, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["sku", "name", "quantity", "price"])
        for item in warehouse.items.values():
            writer.writerow([item.sku, item.name, item.quantity, item.price])
