class Item:
    def __init__(self, sku, name, quantity, price):
        self.sku = sku
        self.name = name
        self.quantity = quantity
        self.price = price

    def total_value(self):
        return self.quantity * self.price


class Warehouse:
    def __init__(self):
        self.items = {}

    def add(self, item):
        existing = self.items.get(item.sku)
        if existing is None:
            self.items[item.sku] = item
        else:
            existing.quantity += item.quantity

    def remove(self, sku, quantity):
        item = self.items[sku]
        if quantity > item.quantity:
            raise ValueError("not enough stock for " + sku)
        item.quantity -= quantity

    def value(self):
        return sum(i.total_value() for i in self.items.values())
