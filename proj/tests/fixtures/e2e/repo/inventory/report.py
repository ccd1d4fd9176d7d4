from inventory.storage import load_csv


def low_stock(warehouse, threshold):
    return sorted(i.sku for i in warehouse.items.values() if i.quantity < threshold)


def format_report(warehouse, threshold=5):
    lines = ["Total value: %.2f" % warehouse.value()]
    for sku in low_stock(warehouse, threshold):
        lines.append("Low stock: " + sku)
    return "\n".join(lines)


def main(path):
    print(format_report(load_csv(path)))
